#pragma once

#include <string>
#include <vector>

#include "startile/substitution.hpp"

namespace startile {

inline const double kGolden = (1.0 + std::sqrt(5.0)) / 2.0;

// L-tromino of three unit squares, four chairs per inflated chair, xi = 2.
SubstitutionSystem chair_system();
// Unit square quadrisected, xi = 2.
SubstitutionSystem squares_system();
// Robinson half-kite (acute, id 0) and half-dart (obtuse, id 1), xi = golden ratio.
SubstitutionSystem penrose_system();

std::vector<std::string> builtin_names();
// Throws ValidationError for unknown names.
SubstitutionSystem builtin_system(const std::string& name);

namespace penrose {
inline constexpr int acute = 0;
inline constexpr int obtuse = 1;
// Vertex roles in the canonical prototiles.
inline constexpr std::size_t tip = 0, tail = 1, side = 2;  // acute
inline constexpr std::size_t nose = 0, wing = 1, reflex = 2;  // obtuse
}  // namespace penrose

}  // namespace startile
