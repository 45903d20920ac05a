#include "persona_lab/persona.hpp"

namespace persona_lab {

char trait_code(Trait t) {
  static constexpr std::array<char, 5> codes{'A', 'C', 'E', 'N', 'O'};
  return codes[static_cast<std::size_t>(t)];
}

std::string_view trait_name(Trait t) {
  static constexpr std::array<std::string_view, 5> names{
      "Agreeableness", "Conscientiousness", "Extraversion", "Neuroticism", "Openness"};
  return names[static_cast<std::size_t>(t)];
}

std::optional<Trait> parse_trait(std::string_view code) {
  if (code.size() != 1) return std::nullopt;
  for (Trait t : kTraits) {
    if (trait_code(t) == code[0]) return t;
  }
  return std::nullopt;
}

std::optional<PersonaCondition> PersonaCondition::parse(std::string_view code) {
  if (code == "BASE") return baseline();
  if (code.size() != 3 || code[1] != '_') return std::nullopt;
  auto trait = parse_trait(code.substr(0, 1));
  if (!trait) return std::nullopt;
  if (code[2] == 'H') return of(*trait, Polarity::High);
  if (code[2] == 'L') return of(*trait, Polarity::Low);
  return std::nullopt;
}

std::string PersonaCondition::code() const {
  if (is_baseline()) return "BASE";
  std::string out;
  out += trait_code(trait());
  out += '_';
  out += polarity() == Polarity::High ? 'H' : 'L';
  return out;
}

std::array<PersonaCondition, PersonaCondition::kCount> all_conditions() {
  std::array<PersonaCondition, PersonaCondition::kCount> out;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = PersonaCondition::from_index(i);
  return out;
}

std::array<PersonaCondition, PersonaCondition::kCount - 1> polarity_conditions() {
  std::array<PersonaCondition, PersonaCondition::kCount - 1> out;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = PersonaCondition::from_index(i + 1);
  return out;
}

}  // namespace persona_lab
