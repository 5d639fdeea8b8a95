// Barrier policies realized on sampled paths.
//
// Two routes to the same object, kept deliberately independent so each can
// check the other:
//   * apply_band       - incremental regulator: clamp the running level into
//                        [a,b], attributing the clamped amount to cumulative
//                        purchases L or sales U.
//   * net_control_*    - the double-Skorokhod net-control formula
//                        W = L - U = -max( (x0-b)^+ ^ inf_u (X_u - a),
//                                          sup_s [ (X_s-b) ^ inf_{u in [s,t]} (X_u - a) ] )
//                        evaluated over grid nodes.
// The formula is evaluated by an exact reassociation of its min/max lattice:
//   A_k = min(A_{k-1}, X_k - a),            A_0 = min((X_0-b)^+, X_0 - a)
//   S_k = max(min(S_{k-1}, X_k - a), X_k - b),  S_0 = X_0 - b
//   W_k = -max(A_k, S_k)
// Min/max are exact in floating point, so this equals the direct O(N^2)
// evaluation bit for bit while costing O(1) per node.
#pragma once

#include <algorithm>
#include <vector>

#include "reserveband/gbm.hpp"
#include "reserveband/model.hpp"

namespace reserveband {

// Grid-aligned controlled triple: z = x + l - u at every node, l/u
// cumulative and nondecreasing from 0, with a possible jump at time 0.
// Purchases charge only at z = a and sales only at z = b: whenever an
// increment of l (resp. u) is positive, z holds the barrier value exactly,
// so the complementarity sums vanish identically rather than to tolerance.
struct ControlledPath {
    double t0 = 0.0;
    double dt = 0.0;
    std::vector<double> z;  // controlled level
    std::vector<double> l;  // cumulative purchases
    std::vector<double> u;  // cumulative sales
};

// Net control W_t = L_t - U_t at every grid node.
inline std::vector<double> net_control_closed_form(const SamplePath& path,
                                                   const BandPolicy& band) {
    const auto& x = path.values;
    std::vector<double> w(x.size());
    if (x.empty()) return w;

    const double a = band.a;
    const double b = band.b;
    double floor_min = std::min(std::max(x[0] - b, 0.0), x[0] - a);  // (x0-b)^+ ^ inf(X-a)
    double sup_term = x[0] - b;
    w[0] = -std::max(floor_min, sup_term);
    for (std::size_t k = 1; k < x.size(); ++k) {
        floor_min = std::min(floor_min, x[k] - a);
        sup_term = std::max(std::min(sup_term, x[k] - a), x[k] - b);
        w[k] = -std::max(floor_min, sup_term);
    }
    return w;
}

// Incremental two-sided regulator. Carries z across nodes by the raw
// increments of x and clamps into [a,b]; the clamped amount goes to l or u.
// Time 0 admits a jump in either direction (u for x0 > b, l for x0 < a).
inline void apply_band_into(const SamplePath& path, const BandPolicy& band, ControlledPath& out) {
    const auto& x = path.values;
    out.t0 = path.t0;
    out.dt = path.dt;
    out.z.resize(x.size());
    out.l.resize(x.size());
    out.u.resize(x.size());
    if (x.empty()) return;

    const double a = band.a;
    const double b = band.b;

    double l = 0.0, u = 0.0, z = x[0];
    if (z < a) {
        l = a - z;
        z = a;
    } else if (z > b) {
        u = z - b;
        z = b;
    }
    out.z[0] = z;
    out.l[0] = l;
    out.u[0] = u;

    for (std::size_t k = 1; k < x.size(); ++k) {
        double zc = z + (x[k] - x[k - 1]);
        if (zc < a) {
            l += a - zc;
            zc = a;
        } else if (zc > b) {
            u += zc - b;
            zc = b;
        }
        z = zc;
        out.z[k] = z;
        out.l[k] = l;
        out.u[k] = u;
    }
}

inline ControlledPath apply_band(const SamplePath& path, const BandPolicy& band) {
    ControlledPath c;
    apply_band_into(path, band, c);
    return c;
}

// One-sided regulator at the floor: reflect at a, never sell.
inline void apply_floor_only_into(const SamplePath& path, double a, ControlledPath& out) {
    const auto& x = path.values;
    out.t0 = path.t0;
    out.dt = path.dt;
    out.z.resize(x.size());
    out.l.resize(x.size());
    out.u.assign(x.size(), 0.0);
    if (x.empty()) return;

    double l = 0.0, z = x[0];
    if (z < a) {
        l = a - z;
        z = a;
    }
    out.z[0] = z;
    out.l[0] = l;
    for (std::size_t k = 1; k < x.size(); ++k) {
        double zc = z + (x[k] - x[k - 1]);
        if (zc < a) {
            l += a - zc;
            zc = a;
        }
        z = zc;
        out.z[k] = z;
        out.l[k] = l;
    }
}

inline void apply_policy_into(const SamplePath& path, const PolicySpec& policy,
                              ControlledPath& out) {
    if (policy.kind == PolicySpec::Kind::Band)
        apply_band_into(path, policy.band, out);
    else
        apply_floor_only_into(path, policy.floor, out);
}

inline ControlledPath apply_policy(const SamplePath& path, const PolicySpec& policy) {
    ControlledPath c;
    apply_policy_into(path, policy, c);
    return c;
}

}  // namespace reserveband
