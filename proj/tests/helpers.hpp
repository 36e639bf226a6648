#pragma once

#include "pbmem/core.hpp"
#include "pbmem/solver1d.hpp"

// Shared reference configuration: spherical membrane 2 < r < 3 in a
// 1:1 electrolyte, eps_s/eps_m = 80/2, a central Gaussian charge Q = 5
// of width 0.2, and anionic lipid pools C_c = 3, C_e = 4.

namespace ref {

inline pbmem::PhysicalParams params() {
    pbmem::PhysicalParams p;
    p.beta = 1.0;
    p.eps_s = 80.0;
    p.eps_m = 2.0;
    p.ions = {{1.0, 1.0}, {-1.0, 1.0}};
    p.lipid_charge = -1.0;
    p.lipid_pool_c = 3.0;
    p.lipid_pool_e = 4.0;
    return p;
}

inline pbmem::RadialGeometry radial(int n = 4096) {
    pbmem::RadialGeometry g;
    g.R_c = 2.0;
    g.R_e = 3.0;
    g.R_outer = 13.0;
    g.node_count = n;
    return g;
}

inline pbmem::SourceCharge source() {
    pbmem::SourceCharge s;
    s.charges = {{pbmem::Vec3::Zero(), 5.0, 0.2}};
    return s;
}

inline pbmem::BoundaryData zero_bc() { return {}; }

}  // namespace ref
