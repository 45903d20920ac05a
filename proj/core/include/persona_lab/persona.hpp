#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace persona_lab {

/// Big Five dimensions, in canonical (alphabetical) order.
enum class Trait : std::uint8_t { A, C, E, N, O };

enum class Polarity : std::uint8_t { High, Low };

inline constexpr std::array<Trait, 5> kTraits{Trait::A, Trait::C, Trait::E, Trait::N, Trait::O};

char trait_code(Trait t);
std::string_view trait_name(Trait t);
std::optional<Trait> parse_trait(std::string_view code);

/// Baseline inference or one of the ten (trait, polarity) steering conditions.
///
/// Conditions have a dense index in [0, 11): BASE is 0, then A_H, A_L, C_H, ...,
/// O_L. The index order is also the canonical sort order.
class PersonaCondition {
 public:
  static constexpr std::size_t kCount = 11;

  constexpr PersonaCondition() = default;
  static constexpr PersonaCondition baseline() { return PersonaCondition{}; }
  static constexpr PersonaCondition of(Trait t, Polarity p) {
    return PersonaCondition(static_cast<std::uint8_t>(1 + 2 * static_cast<int>(t) + static_cast<int>(p)));
  }
  static constexpr PersonaCondition from_index(std::size_t index) {
    return PersonaCondition(static_cast<std::uint8_t>(index));
  }

  /// Parses a canonical code (BASE, A_H, ..., O_L). Case-sensitive.
  static std::optional<PersonaCondition> parse(std::string_view code);

  constexpr bool is_baseline() const { return index_ == 0; }
  constexpr std::size_t index() const { return index_; }
  // Precondition: !is_baseline().
  constexpr Trait trait() const { return static_cast<Trait>((index_ - 1) / 2); }
  constexpr Polarity polarity() const { return static_cast<Polarity>((index_ - 1) % 2); }

  std::string code() const;

  constexpr auto operator<=>(const PersonaCondition&) const = default;

 private:
  constexpr explicit PersonaCondition(std::uint8_t index) : index_(index) {}
  std::uint8_t index_ = 0;
};

/// All eleven conditions in canonical order (BASE first).
std::array<PersonaCondition, PersonaCondition::kCount> all_conditions();

/// The ten non-baseline polarity conditions in canonical order.
std::array<PersonaCondition, PersonaCondition::kCount - 1> polarity_conditions();

}  // namespace persona_lab
