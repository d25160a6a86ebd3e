#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mortgeom {

enum class Sex { Female, Male, Total };

std::string_view to_string(Sex sex);
/// Accepts "female", "male", "total" (case-insensitive).
Sex parse_sex(std::string_view text);

/// Rectangular grid of death rates indexed by calendar year (rows) and
/// integer age (columns). Years and ages are consecutive integers; cells may
/// be missing, in which case they are flagged in the mask and the stored
/// value is NaN.
///
/// Immutable after construction; safe to share between readers.
class MortalitySurface {
 public:
  /// `rates` is row-major (year-major) with std::nullopt for missing cells.
  /// Throws StructuralError on a size mismatch or an empty grid and
  /// FormatError on negative or non-finite rates.
  MortalitySurface(int first_year, int first_age, std::size_t num_years,
                   std::size_t num_ages,
                   const std::vector<std::optional<double>>& rates,
                   Sex sex = Sex::Total, std::string source_label = {});

  int first_year() const { return first_year_; }
  int last_year() const { return first_year_ + static_cast<int>(num_years_) - 1; }
  int first_age() const { return first_age_; }
  int last_age() const { return first_age_ + static_cast<int>(num_ages_) - 1; }
  std::size_t num_years() const { return num_years_; }
  std::size_t num_ages() const { return num_ages_; }
  std::vector<int> years() const;
  std::vector<int> ages() const;

  Sex sex() const { return sex_; }
  const std::string& source_label() const { return source_label_; }

  /// Index-based access; (i, j) = (year index, age index).
  bool missing(std::size_t i, std::size_t j) const {
    return missing_[i * num_ages_ + j] != 0;
  }
  /// NaN when missing.
  double rate(std::size_t i, std::size_t j) const { return rates_[i * num_ages_ + j]; }
  std::optional<double> at(int year, int age) const;

  std::size_t missing_count() const;

  friend bool operator==(const MortalitySurface& a, const MortalitySurface& b);

 private:
  int first_year_;
  int first_age_;
  std::size_t num_years_;
  std::size_t num_ages_;
  std::vector<double> rates_;
  std::vector<std::uint8_t> missing_;
  Sex sex_;
  std::string source_label_;
};

}  // namespace mortgeom
