#pragma once

#include <string>

namespace extsource {

/// Structure of the equilibrium pair near the origin: I = constraint inactive
/// with a support gap, II = active with a gap, III = active without a gap.
enum class PhaseCase { I, II, III, boundary_critical };

std::string to_string(PhaseCase c);

}  // namespace extsource
