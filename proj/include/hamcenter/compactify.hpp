#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "hamcenter/annulus.hpp"
#include "hamcenter/poly.hpp"

namespace hamcenter {

/// Charts of the Poincaré sphere along the equator.
///   U1/V1: x = s/v, y = s·u/v      (s = +1 / -1)
///   U2/V2: y = s/v, x = s·u/v
/// v > 0 is the finite side in every chart. The chart fields are multiplied by
/// v^(d-1), which keeps the time orientation of the planar field.
enum class Chart { U1, U2, V1, V2 };
const char* to_string(Chart c);

struct ChartField {
    Chart chart = Chart::U1;
    Poly2 u_dot;  // polynomials in (u, v), stored with u in the x slot and v in the y slot
    Poly2 v_dot;

    Vec2 eval(Vec2 uv) const { return {u_dot.eval(uv), v_dot.eval(uv)}; }
    /// Chart coordinates of a finite point in this chart's half-plane.
    Vec2 from_plane(Vec2 p) const;
    Vec2 to_plane(Vec2 uv) const;
    double sign() const { return chart == Chart::U1 || chart == Chart::U2 ? 1.0 : -1.0; }
};

struct CompactifiedField {
    int degree = 0;     // d = max degree of P, Q
    Poly2 hamiltonian;
    Poly2 p, q;         // P = -H_y, Q = H_x
    Poly2 p_top, q_top; // degree-d homogeneous parts
    Poly2 equator;      // x·Q_d - y·P_d, homogeneous of degree d + 1
    std::array<ChartField, 4> charts;  // U1, U2, V1, V2

    const ChartField& chart(Chart c) const { return charts[static_cast<int>(c)]; }
    /// G(θ) = equator(cos θ, sin θ) and its derivatives.
    double g(double theta, int derivative = 0) const;
};

/// Throws PreconditionError when one field component vanishes identically
/// (H depends on one variable only, a line field with non-isolated zeros).
CompactifiedField build_compactification(const Poly2& hamiltonian);

/// Largest relative direction deviation between each chart field and the
/// pushforward of (P, Q), over `samples` random points per chart; also false
/// if any pair pointed in opposite directions.
struct ChartConsistency {
    double max_direction_dev = 0.0;
    bool all_positive = true;
};
ChartConsistency chart_consistency(const CompactifiedField& cf, int samples = 100, std::uint64_t seed = 42);

enum class SectorClass { two_degenerate_hyperbolic, has_nondegenerate_sector, unclassified };
const char* to_string(SectorClass c);

struct SectorEvidence {
    int seeds = 0;
    int captured = 0;   // reaches the singular point in forward or backward time
    int pass_over = 0;  // leaves the 2r-ball in both time directions, on opposite sides
    int same_side = 0;  // leaves in both directions on the same side
    int undecided = 0;  // step budget exhausted
    int discarded = 0;  // non-finite chart field
};

struct InfinitySingularity {
    double theta = 0.0;  // in [0, π)
    Chart chart = Chart::U1;
    double u = 0.0;      // chart coordinate, v = 0
    int multiplicity = 1;
    bool multiple = false;
    double residual = 0.0;
    SectorClass classification = SectorClass::unclassified;
    double confidence = 0.0;
    SectorEvidence evidence;
};

struct InfinityScan {
    bool equator_singular = false;  // G ≡ 0
    std::vector<InfinitySingularity> points;
};

/// Roots of G on [0, π) from a 2048-interval scan of G and G', refined by
/// bisection and Newton. Classification is left unset.
InfinityScan infinite_singularities(const CompactifiedField& cf);

/// The chart containing direction θ on the equator and the point's u there.
std::pair<Chart, double> chart_for_direction(double theta);

struct SectorOptions {
    int fan_n = 32;
    double r = 0.05;
    Exec exec = Exec::parallel;
};

/// Fan heuristic: seeds on the half-circle of radius r on the finite side,
/// each integrated both ways along the arc-length normalised chart field.
/// Any captured seed means a parabolic or elliptic sector, hence a sector
/// that is not a degenerate hyperbolic one.
void classify_sectors(const CompactifiedField& cf, InfinitySingularity& s, const SectorOptions& opt = {});

/// Same classification at the antipodal point θ + π (the V/U counterpart chart).
InfinitySingularity antipode(const CompactifiedField& cf, const InfinitySingularity& s, const SectorOptions& opt = {});

enum class Tri { yes, no, unknown };
const char* to_string(Tri t);

struct CriterionRow {
    std::string id;  // "a", "b", "c", "d"
    Tri holds = Tri::unknown;
    std::string source;
};

struct ContiVerdict {
    bool applicable = false;
    std::string type;  // "A", "B" or "not-applicable"
    bool routes_agree = false;
    std::string status;  // "consistent" or "inconsistent - inspect portrait"
    std::vector<CriterionRow> criteria;
    std::vector<std::string> notes;
};

/// Type A iff criterion (d) holds. The annulus route gives (a)-(c) from the
/// per-center global verdicts; both routes are recorded and compared.
ContiVerdict conti_verdict(bool hamiltonian_polynomial, const std::vector<GlobalCheck>& annulus_route,
                           const InfinityScan& scan);

}  // namespace hamcenter
