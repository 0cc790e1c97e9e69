#ifndef CLUVIR_POTENTIAL_HPP
#define CLUVIR_POTENTIAL_HPP

#include <map>
#include <string>
#include <vector>

namespace cluvir {

enum class PieceShape { Constant, Ramp };

// One finite piece of a radial potential on [r_lo, r_hi).
// Constant pieces have v_lo == v_hi; ramp pieces interpolate linearly.
struct PotentialPiece {
    double r_lo = 0.0;
    double r_hi = 0.0;
    PieceShape shape = PieceShape::Constant;
    double v_lo = 0.0;
    double v_hi = 0.0;
};

// Radial pair potential v(r): +infinity on [0, r_hc), piecewise
// constant/linear on [r_hc, b), identically zero on [b, infinity).
// Immutable after construction; all methods are const and thread-safe.
class PairPotential {
public:
    PairPotential(double hard_core_radius, int dimension,
                  std::vector<PotentialPiece> pieces);

    double hard_core_radius() const { return r_hc_; }
    double range() const { return b_; }
    int dimension() const { return dim_; }
    const std::vector<PotentialPiece>& pieces() const { return pieces_; }

    // v(r); +infinity iff r < hard core radius. Throws on r < 0.
    double evaluate(double r) const;

    // Mayer weight f(r) = exp(-beta v(r)) - 1, with f = -1 inside the core.
    double mayer_f(double r, double beta) const;

    // |||v||| = |B(0, r_hc)| + integral of |v(|x|)| outside the core,
    // computed by exact piecewise integration in `dimension` dimensions.
    double v_norm() const;

    // Minimum of v over [r_hc, infinity) and one distance attaining it.
    double min_value() const { return min_value_; }
    double argmin_distance() const { return argmin_r_; }

    bool has_hard_core() const { return r_hc_ > 0.0; }
    bool attractive_tail() const;
    // True when every finite piece is constant (enables exact midpoint
    // quadrature downstream).
    bool only_constant_pieces() const;
    // True when v restricted to [r_hc, infinity) is continuous, including
    // the junctions between pieces and the approach to 0 at r = b.
    bool continuous_outside_core() const;

    // Sorted distances at which the piecewise definition changes,
    // including r_hc and b.
    std::vector<double> breakpoints() const;

    // Distances of local minima of pieces with negative value, deepest
    // first; used for ground-state seeding.
    std::vector<std::pair<double, double>> negative_wells() const;

private:
    double piece_value(const PotentialPiece& p, double r) const;

    double r_hc_;
    double b_;
    int dim_;
    std::vector<PotentialPiece> pieces_;
    double min_value_;
    double argmin_r_;
};

struct PotentialReport {
    bool has_hard_core = false;
    bool attractive_tail = false;
    bool continuous_on_core_boundary = false;
    double v_norm = 0.0;
    // Heuristic stability constant B = -e_inf; NaN until a ground-state
    // estimate is supplied.
    double stability_constant_estimate = 0.0;
};

// Static analysis of a potential. `e_inf_estimate` (if finite) feeds the
// heuristic stability constant B = -e_inf.
PotentialReport analyze_potential(const PairPotential& p,
                                  double e_inf_estimate);

enum class BuiltinKind { SquareWell, RampWell, TwoWell, SoftDisk };

BuiltinKind builtin_kind_from_string(const std::string& name);
std::string to_string(BuiltinKind kind);

// Construct a builtin potential. Parameters not present in `params` take
// the documented defaults; unknown keys are rejected.
//
//   square_well: r_hc, b, depth, dimension
//   ramp_well:   r_hc, b, depth, plateau_end, dimension
//   two_well:    fixed 1-D fixture, no parameters except overrides of
//                r_hc / depths (see implementation)
//   soft_disk:   r_hc, depth, width, dimension (default 2); illustrative
PairPotential make_builtin(BuiltinKind kind,
                           const std::map<std::string, double>& params = {});

// Volume of the d-dimensional ball of radius r.
double ball_volume(int dimension, double r);
// Surface measure of the sphere of radius r in d dimensions.
double sphere_surface(int dimension, double r);

}  // namespace cluvir

#endif
