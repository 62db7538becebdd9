#pragma once

#include "vkg/spectral_field.hpp"

#include <limits>
#include <string>

namespace vkg {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Norm specification: Lp, W^{s,p}, H^s, or Besov B^s_{p,r}.
//
// Text form (used in CSV headers and on the command line):
//   "L1" "L2" "Linf"        Lebesgue
//   "H2" "H0.5"             Sobolev H^s
//   "W1,inf" "W2,1"         Sobolev W^{s,p}, integer s
//   "B0.5,inf,2"            Besov B^s_{p,r}
struct NormSpec {
    enum class Kind { Lebesgue, SobolevH, SobolevW, Besov };

    Kind kind = Kind::Lebesgue;
    double s = 0.0;
    double p = 2.0;
    double r = 2.0;

    static NormSpec lp(double p) { return {Kind::Lebesgue, 0.0, p, 2.0}; }
    static NormSpec hs(double s) { return {Kind::SobolevH, s, 2.0, 2.0}; }
    static NormSpec wsp(int s, double p) { return {Kind::SobolevW, double(s), p, 2.0}; }
    static NormSpec besov(double s, double p, double r) { return {Kind::Besov, s, p, r}; }

    static NormSpec parse(const std::string& text);
    std::string str() const;
};

// Evaluate the norm of a (possibly vector, possibly complex) field.
//  - Lp is a midpoint Riemann sum over the grid; p = inf is the grid max.
//  - H^s uses Parseval with the <k>^s weight.
//  - W^{s,p} sums derivative orders |alpha| <= s (integer s only).
//  - Besov follows the low-lump + dyadic-sum definition over resolvable
//    shells.
// Throws ResolutionError for W^{s,p} with non-integer s, DomainError for
// invalid p, r.
double field_norm(const SpectralField& field, const NormSpec& spec);

// Measured constant of the interpolation inequality
//   ||d^beta f||_inf <= ||f||_inf^{1-q} ||f||_{H^{2+|alpha|}}^q,  q = |beta|/|alpha|.
// Returns the left side divided by the right side.  Throws
// DegenerateInputError when f vanishes identically.
double interpolation_check(const SpectralField& field, const std::array<int, 3>& beta,
                           const std::array<int, 3>& alpha);

// sup-norm over the grid (|.| is the euclidean modulus across components).
double sup_norm(const SpectralField& field);

} // namespace vkg
