#include "mortgeom/surface.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

#include "mortgeom/error.hpp"

namespace mortgeom {

std::string_view to_string(Sex sex) {
  switch (sex) {
    case Sex::Female:
      return "female";
    case Sex::Male:
      return "male";
    case Sex::Total:
      return "total";
  }
  return "total";
}

Sex parse_sex(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "female") return Sex::Female;
  if (lower == "male") return Sex::Male;
  if (lower == "total") return Sex::Total;
  throw FormatError("unknown sex '" + std::string(text) + "' (expected female, male or total)");
}

MortalitySurface::MortalitySurface(int first_year, int first_age, std::size_t num_years,
                                   std::size_t num_ages,
                                   const std::vector<std::optional<double>>& rates, Sex sex,
                                   std::string source_label)
    : first_year_(first_year),
      first_age_(first_age),
      num_years_(num_years),
      num_ages_(num_ages),
      sex_(sex),
      source_label_(std::move(source_label)) {
  if (num_years == 0 || num_ages == 0) {
    throw StructuralError("mortality surface must have at least one year and one age");
  }
  if (rates.size() != num_years * num_ages) {
    throw StructuralError("rate count " + std::to_string(rates.size()) +
                          " does not match grid " + std::to_string(num_years) + "x" +
                          std::to_string(num_ages));
  }
  rates_.resize(rates.size());
  missing_.resize(rates.size());
  for (std::size_t k = 0; k < rates.size(); ++k) {
    if (!rates[k]) {
      rates_[k] = std::numeric_limits<double>::quiet_NaN();
      missing_[k] = 1;
      continue;
    }
    const double v = *rates[k];
    if (!std::isfinite(v) || v < 0.0) {
      throw FormatError("invalid rate " + std::to_string(v) + " at year " +
                        std::to_string(first_year + static_cast<int>(k / num_ages)) + ", age " +
                        std::to_string(first_age + static_cast<int>(k % num_ages)));
    }
    rates_[k] = v;
  }
}

std::vector<int> MortalitySurface::years() const {
  std::vector<int> out(num_years_);
  for (std::size_t i = 0; i < num_years_; ++i) out[i] = first_year_ + static_cast<int>(i);
  return out;
}

std::vector<int> MortalitySurface::ages() const {
  std::vector<int> out(num_ages_);
  for (std::size_t j = 0; j < num_ages_; ++j) out[j] = first_age_ + static_cast<int>(j);
  return out;
}

std::optional<double> MortalitySurface::at(int year, int age) const {
  if (year < first_year_ || year > last_year() || age < first_age_ || age > last_age()) {
    return std::nullopt;
  }
  const auto i = static_cast<std::size_t>(year - first_year_);
  const auto j = static_cast<std::size_t>(age - first_age_);
  if (missing(i, j)) return std::nullopt;
  return rate(i, j);
}

std::size_t MortalitySurface::missing_count() const {
  return static_cast<std::size_t>(std::count(missing_.begin(), missing_.end(), 1));
}

bool operator==(const MortalitySurface& a, const MortalitySurface& b) {
  if (a.first_year_ != b.first_year_ || a.first_age_ != b.first_age_ ||
      a.num_years_ != b.num_years_ || a.num_ages_ != b.num_ages_ || a.sex_ != b.sex_ ||
      a.source_label_ != b.source_label_ || a.missing_ != b.missing_) {
    return false;
  }
  for (std::size_t k = 0; k < a.rates_.size(); ++k) {
    if (a.missing_[k] == 0 && a.rates_[k] != b.rates_[k]) return false;
  }
  return true;
}

}  // namespace mortgeom
