#ifndef PATHWAYS_SPECIAL_HPP
#define PATHWAYS_SPECIAL_HPP

namespace pathways::special {

// Regularized incomplete gamma functions P(a,z) and Q(a,z) = 1 - P(a,z), a > 0, z >= 0.
double gamma_p(double a, double z);
double gamma_q(double a, double z);

// Upper incomplete gamma Γ(a,z) = ∫_z^∞ t^{a-1} e^{-t} dt.
// a > 0 with z >= 0, or a in (-1, 0) with z > 0 (via Γ(a,z) = (Γ(a+1,z) - z^a e^{-z}) / a).
double upper_gamma(double a, double z);

// Lower incomplete gamma γ(a,z) = ∫_0^z t^{a-1} e^{-t} dt, a > 0, z in [0, ∞].
double lower_gamma(double a, double z);

} // namespace pathways::special

#endif // PATHWAYS_SPECIAL_HPP
