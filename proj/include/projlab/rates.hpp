#pragma once

// Closed-form Fejer constants and R-linear rate bounds for cyclic schemes.
//
// Every rate is of the form rho_block = [bracket]_+^(1/2): the guaranteed
// contraction of d_C over a block of k consecutive iterates. The per-iterate
// rate is rho_block^(1/k). Certificates store both, together with the start
// radius that makes the locality hypothesis concrete.

#include <optional>
#include <string>
#include <vector>

namespace projlab {

struct FejerConstants {
    double gamma = 1.0;
    double beta = 0.0;
};

enum class Theorem {
    DistQFF,
    DistQF,
    Refined,
    CyclicRelaxed,
    CyclicOverRelaxed,
    CyclicProjections,
    ConvexCyclic,
    SemiIntrepid,
    ConvexSemiIntrepid,
    CyclicDR,
};

const char* to_string(Theorem t);

enum class Provenance { Analytic, Empirical };

const char* to_string(Provenance p);

struct RateCertificate {
    Theorem theorem = Theorem::DistQFF;
    Provenance provenance = Provenance::Analytic;

    // inputs, echoed
    std::vector<double> gammas;
    std::vector<double> betas;
    std::vector<double> params; ///< lambda_i, alpha_i (semi-intrepid) or alpha_j (DR), when relevant
    std::vector<int> J;         ///< reflection / full-intrepid indices, or {j} for DistQF
    double eps = 0.0;
    double kappa = 0.0;
    double nu = 0.0;
    int m = 0; ///< operators per cycle

    double Gamma = 1.0;
    double bracket = 0.0;   ///< value before the [.]_+ clamp
    double rho_block = 0.0; ///< contraction over k iterates
    int k = 1;              ///< block length
    double rho_iter = 0.0;  ///< rho_block^(1/k)
    double rho_cycle = 0.0; ///< rho_iter^m
    bool applicable = false;

    double delta0_ratio = 0.0;    ///< delta_0 / delta
    double start_prefactor = 1.0; ///< extra shrink of the start ball (gamma_max^(-1/2) for m-1 step blocks)
    double start_ratio = 0.0;     ///< certified start radius / delta
    /// Lemma-style envelope prefactor: |x_n - xbar| <= sigma_factor d_C(x_0) rho_block^floor(n/k)
    double sigma_factor = 0.0;
};

FejerConstants relaxed_projector_constants(double lambda, double eps);
FejerConstants averaged_constants(double gamma, double beta, double lambda);
FejerConstants dr_constants(double lambda, double mu, double alpha, double eps1, double eps2);
double dr_coercivity(double lambda, double mu, double alpha, double theta, double kappa);
FejerConstants semi_intrepid_constants(double alpha, double eps);

RateCertificate rate_dist_qff(const std::vector<double>& gammas, const std::vector<double>& betas, double nu,
                              double kappa);
/// j is a 0-based index into gammas; betas_without_j has m - 1 entries, beta_i
/// for i != j in index order.
RateCertificate rate_dist_qf(const std::vector<double>& gammas, const std::vector<double>& betas_without_j, int j,
                             double nu, double kappa);
RateCertificate rate_refined(const std::vector<double>& gammas, const std::vector<double>& betas, double kappa);
/// J is derived from lambdas (entries equal to 2).
RateCertificate rate_cyclic_relaxed(const std::vector<double>& lambdas, double eps, double kappa);
RateCertificate rate_cyclic_overrelaxed(const std::vector<double>& lambdas, double eps, double kappa);
RateCertificate rate_cyclic_projections(int m, double eps, double kappa);
RateCertificate rate_convex_cyclic(const std::vector<double>& lambdas, double kappa);
RateCertificate rate_cyclic_semi_intrepid(const std::vector<double>& alphas, double eps, double kappa);
RateCertificate rate_convex_semi_intrepid(const std::vector<double>& alphas, double kappa);
/// One entry per DR block; betas are (1 - alpha_j) / alpha_j.
RateCertificate rate_cyclic_dr(const std::vector<double>& gammas, const std::vector<double>& betas, double nu,
                               double kappa);

/// Certified start radius for a given delta.
inline double start_radius(const RateCertificate& c, double delta) { return c.start_ratio * delta; }

} // namespace projlab
