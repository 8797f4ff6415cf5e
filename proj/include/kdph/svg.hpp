// kdph: persistent homology for the k-distance under random projections.
// Released under the Apache License, Version 2.0
// (http://www.apache.org/licenses/LICENSE-2.0).

#pragma once

#include <span>
#include <string>

#include "kdph/persistence.hpp"

namespace kdph {

// Static scatter plot: diagonal, the multiplicative beta band around it,
// finite pairs as dots, infinite pairs as markers pinned to the top edge.
std::string diagram_svg(const PersistenceDiagram& D, double beta,
                        const std::string& title);

// Writes h<degree>_before.svg / h<degree>_after.svg into dir (created if
// missing). The two lists must align degree by degree.
void write_diagram_svgs(std::span<const PersistenceDiagram> before,
                        std::span<const PersistenceDiagram> after, double beta,
                        const std::string& dir);

}  // namespace kdph
