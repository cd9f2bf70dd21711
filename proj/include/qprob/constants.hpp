#pragma once

// Default tolerances. Every operation that uses one also takes it as an argument.
namespace qprob::tol {

inline constexpr double hermitian = 1e-10;
inline constexpr double eig_group = 1e-9;   // relative
inline constexpr double projector = 1e-10;
inline constexpr double density = 1e-10;    // trace, hermiticity, negative-eigenvalue clip
inline constexpr double unitary = 1e-10;
inline constexpr double kraus = 1e-9;
inline constexpr double coalesce = 1e-9;    // relative to max |eigenvalue|
inline constexpr double energy_preserving = 1e-9;
inline constexpr double local_thermal = 1e-9;
inline constexpr double postselection = 1e-12;
inline constexpr double thermal_floor = 1e-300;
inline constexpr double max_condition = 1e12;
inline constexpr double detector_tail = 1e-3;
inline constexpr double critical_gap = 1e-14;
inline constexpr double support = 1e-14;

}  // namespace qprob::tol
