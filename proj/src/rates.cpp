#include "projlab/rates.hpp"

#include "projlab/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace projlab {

const char* to_string(Theorem t)
{
    switch (t) {
    case Theorem::DistQFF: return "DistQFF";
    case Theorem::DistQF: return "DistQF";
    case Theorem::Refined: return "Refined";
    case Theorem::CyclicRelaxed: return "CyclicRelaxed";
    case Theorem::CyclicOverRelaxed: return "CyclicOverRelaxed";
    case Theorem::CyclicProjections: return "CyclicProjections";
    case Theorem::ConvexCyclic: return "ConvexCyclic";
    case Theorem::SemiIntrepid: return "SemiIntrepid";
    case Theorem::ConvexSemiIntrepid: return "ConvexSemiIntrepid";
    case Theorem::CyclicDR: return "CyclicDR";
    }
    return "Unknown";
}

const char* to_string(Provenance p)
{
    return p == Provenance::Analytic ? "analytic" : "empirical";
}

namespace {

void domain(bool ok, const std::string& what)
{
    require(ok, ErrorKind::Domain, what);
}

void check_eps(double eps, const char* where)
{
    domain(eps >= 0.0 && eps < 1.0, std::string(where) + ": eps must lie in [0, 1)");
}

void check_kappa(double kappa, const char* where)
{
    domain(kappa > 0.0 && std::isfinite(kappa), std::string(where) + ": kappa must be positive and finite");
}

double product(const std::vector<double>& v)
{
    return std::accumulate(v.begin(), v.end(), 1.0, std::multiplies<>());
}

double min_of(const std::vector<double>& v) { return *std::min_element(v.begin(), v.end()); }
double max_of(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }

// Fills the derived fields once Gamma, bracket, k, m and delta0_ratio are set.
void finish(RateCertificate& c)
{
    c.rho_block = std::sqrt(std::max(0.0, c.bracket));
    c.rho_iter = std::pow(c.rho_block, 1.0 / c.k);
    c.rho_cycle = std::pow(c.rho_iter, c.m);
    c.applicable = c.rho_block < 1.0;
    if (c.applicable) {
        c.start_ratio = c.start_prefactor * c.delta0_ratio * (1.0 - c.rho_block) / (2.0 + c.Gamma - c.rho_block);
        c.sigma_factor = c.Gamma * (1.0 + c.Gamma) / (1.0 - c.rho_block);
    } else {
        c.start_ratio = 0.0;
        c.sigma_factor = std::numeric_limits<double>::infinity();
    }
}

std::vector<double> relaxed_gammas(const std::vector<double>& lambdas, double eps)
{
    std::vector<double> g;
    for (double l : lambdas) g.push_back(1.0 + l * eps / (1.0 - eps));
    return g;
}

} // namespace

FejerConstants relaxed_projector_constants(double lambda, double eps)
{
    domain(lambda > 0.0 && lambda <= 2.0, "relaxed_projector_constants: lambda must lie in (0, 2]");
    check_eps(eps, "relaxed_projector_constants");
    return {1.0 + lambda * eps / (1.0 - eps), (2.0 - lambda) / lambda};
}

FejerConstants averaged_constants(double gamma, double beta, double lambda)
{
    domain(gamma >= 1.0, "averaged_constants: gamma must be >= 1");
    domain(beta >= 0.0, "averaged_constants: beta must be >= 0");
    domain(lambda > 0.0 && lambda <= 1.0 + beta, "averaged_constants: lambda must lie in (0, 1 + beta]");
    return {1.0 - lambda + lambda * gamma, (1.0 - lambda + beta) / lambda};
}

FejerConstants dr_constants(double lambda, double mu, double alpha, double eps1, double eps2)
{
    domain(lambda > 0.0 && lambda <= 2.0, "dr_constants: lambda must lie in (0, 2]");
    domain(mu > 0.0 && mu <= 2.0, "dr_constants: mu must lie in (0, 2]");
    domain(alpha > 0.0 && alpha <= 1.0, "dr_constants: alpha must lie in (0, 1]");
    domain(eps1 >= 0.0 && eps1 <= 1.0 / 3.0, "dr_constants: eps1 must lie in [0, 1/3]");
    check_eps(eps2, "dr_constants");
    const double ga = 1.0 + lambda * eps1 / (1.0 - eps1);
    const double gb = 1.0 + mu * eps2 / (1.0 - eps2);
    return {1.0 - alpha + alpha * ga * gb, (1.0 - alpha) / alpha};
}

double dr_coercivity(double lambda, double mu, double alpha, double theta, double kappa)
{
    domain(lambda > 0.0 && lambda <= 2.0, "dr_coercivity: lambda must lie in (0, 2]");
    domain(mu > 0.0 && mu <= 2.0, "dr_coercivity: mu must lie in (0, 2]");
    domain(alpha > 0.0, "dr_coercivity: alpha must be positive");
    check_kappa(kappa, "dr_coercivity");
    require(theta < 1.0, ErrorKind::StrongRegularityFailed, "dr_coercivity: theta >= 1, the pair is not transversal");
    domain(theta >= -1.0, "dr_coercivity: theta must be >= -1");
    return alpha * std::sqrt(1.0 - theta) / kappa * std::min(lambda, mu / std::sqrt(1.0 + mu * mu));
}

FejerConstants semi_intrepid_constants(double alpha, double eps)
{
    domain(alpha >= 0.0 && alpha <= 1.0, "semi_intrepid_constants: alpha must lie in [0, 1]");
    check_eps(eps, "semi_intrepid_constants");
    return {(1.0 + alpha * eps) / (1.0 - eps), (1.0 - alpha) / (1.0 + alpha)};
}

RateCertificate rate_dist_qff(const std::vector<double>& gammas, const std::vector<double>& betas, double nu,
                              double kappa)
{
    domain(!gammas.empty() && gammas.size() == betas.size(), "rate_dist_qff: need one (gamma, beta) pair per operator");
    for (double g : gammas) domain(g >= 1.0, "rate_dist_qff: gamma_i must be >= 1");
    for (double b : betas) domain(b > 0.0, "rate_dist_qff: beta_i must be > 0");
    domain(nu > 0.0 && nu <= 1.0, "rate_dist_qff: nu must lie in (0, 1]");
    check_kappa(kappa, "rate_dist_qff");

    RateCertificate c;
    c.theorem = Theorem::DistQFF;
    c.gammas = gammas;
    c.betas = betas;
    c.nu = nu;
    c.kappa = kappa;
    c.m = static_cast<int>(gammas.size());
    c.k = c.m;
    double inv_beta = 0.0;
    for (double b : betas) inv_beta += 1.0 / b;
    const double g2 = product(gammas);
    c.Gamma = std::sqrt(g2);
    c.bracket = g2 - nu * nu / (kappa * kappa) / inv_beta;
    c.delta0_ratio = std::sqrt(gammas.back()) / (2.0 * c.Gamma);
    finish(c);
    return c;
}

RateCertificate rate_dist_qf(const std::vector<double>& gammas, const std::vector<double>& betas_without_j, int j,
                             double nu, double kappa)
{
    const int m = static_cast<int>(gammas.size());
    domain(m >= 2, "rate_dist_qf: needs m >= 2");
    domain(static_cast<int>(betas_without_j.size()) == m - 1, "rate_dist_qf: needs m - 1 betas");
    domain(j >= 0 && j < m, "rate_dist_qf: j out of range");
    for (double g : gammas) domain(g >= 1.0, "rate_dist_qf: gamma_i must be >= 1");
    for (double b : betas_without_j) domain(b > 0.0, "rate_dist_qf: beta_i must be > 0");
    domain(nu > 0.0 && nu <= 1.0, "rate_dist_qf: nu must lie in (0, 1]");
    check_kappa(kappa, "rate_dist_qf");

    RateCertificate c;
    c.theorem = Theorem::DistQF;
    c.gammas = gammas;
    c.betas = betas_without_j;
    c.J = {j};
    c.nu = nu;
    c.kappa = kappa;
    c.m = m;
    c.k = m;
    double inv_beta = 0.0;
    for (double b : betas_without_j) inv_beta += 1.0 / b;
    const double gj = gammas[static_cast<std::size_t>(j)];
    const double g2 = product(gammas);
    c.Gamma = std::sqrt(g2);
    c.bracket = g2 - gj * nu * nu / (kappa * kappa) / inv_beta;
    c.delta0_ratio = std::sqrt(gj) / (2.0 * c.Gamma);
    finish(c);
    return c;
}

RateCertificate rate_refined(const std::vector<double>& gammas, const std::vector<double>& betas, double kappa)
{
    const int m = static_cast<int>(gammas.size());
    domain(m >= 2 && betas.size() == gammas.size(), "rate_refined: needs m >= 2 (gamma, beta) pairs");
    for (double g : gammas) domain(g >= 1.0, "rate_refined: gamma_i must be >= 1");
    for (double b : betas) domain(b > 0.0, "rate_refined: beta_i must be > 0");
    check_kappa(kappa, "rate_refined");

    RateCertificate c;
    c.theorem = Theorem::Refined;
    c.gammas = gammas;
    c.betas = betas;
    c.kappa = kappa;
    c.nu = 1.0;
    c.m = m;
    c.k = m - 1;
    double inv_beta = 0.0;
    for (double b : betas) inv_beta += 1.0 / b;
    inv_beta -= 1.0 / max_of(betas);
    const double g2 = product(gammas) / min_of(gammas);
    c.Gamma = std::sqrt(g2);
    c.bracket = g2 - 1.0 / (kappa * kappa) / inv_beta;
    c.delta0_ratio = 1.0 / (2.0 * c.Gamma);
    c.start_prefactor = 1.0 / std::sqrt(max_of(gammas));
    finish(c);
    return c;
}

RateCertificate rate_cyclic_relaxed(const std::vector<double>& lambdas, double eps, double kappa)
{
    const int m = static_cast<int>(lambdas.size());
    domain(m >= 1, "rate_cyclic_relaxed: needs at least one operator");
    for (double l : lambdas) domain(l > 0.0 && l <= 2.0, "rate_cyclic_relaxed: lambda_i must lie in (0, 2]");
    check_eps(eps, "rate_cyclic_relaxed");
    check_kappa(kappa, "rate_cyclic_relaxed");

    RateCertificate c;
    c.theorem = Theorem::CyclicRelaxed;
    c.params = lambdas;
    c.eps = eps;
    c.kappa = kappa;
    c.m = m;
    c.k = m;
    for (int i = 0; i < m; ++i)
        if (lambdas[static_cast<std::size_t>(i)] == 2.0) c.J.push_back(i);
    require(c.J.size() <= 1, ErrorKind::MoreThanOneReflection, "rate_cyclic_relaxed: at most one lambda_i may equal 2");
    domain(static_cast<int>(c.J.size()) < m, "rate_cyclic_relaxed: needs an operator with lambda_i < 2");

    c.gammas = relaxed_gammas(lambdas, eps);
    double nu = 1.0;
    double s = 0.0;
    for (int i = 0; i < m; ++i) {
        if (!c.J.empty() && c.J.front() == i) continue;
        const double l = lambdas[static_cast<std::size_t>(i)];
        nu = std::min(nu, l);
        s += l / (2.0 - l);
        c.betas.push_back((2.0 - l) / l);
    }
    c.nu = nu;
    const double g2 = product(c.gammas);
    c.Gamma = std::sqrt(g2);
    c.bracket = g2 - nu * nu / (kappa * kappa) / s * std::pow((1.0 + eps) / (1.0 - eps), static_cast<double>(c.J.size()));
    c.delta0_ratio = std::sqrt(min_of(c.gammas)) / (2.0 * c.Gamma);
    finish(c);
    return c;
}

RateCertificate rate_cyclic_overrelaxed(const std::vector<double>& lambdas, double eps, double kappa)
{
    const int m = static_cast<int>(lambdas.size());
    domain(m >= 2, "rate_cyclic_overrelaxed: needs m >= 2");
    for (double l : lambdas) domain(l >= 1.0 && l < 2.0, "rate_cyclic_overrelaxed: lambda_i must lie in [1, 2)");
    check_eps(eps, "rate_cyclic_overrelaxed");
    check_kappa(kappa, "rate_cyclic_overrelaxed");

    RateCertificate c;
    c.theorem = Theorem::CyclicOverRelaxed;
    c.params = lambdas;
    c.eps = eps;
    c.kappa = kappa;
    c.nu = 1.0;
    c.m = m;
    c.k = m - 1;
    c.gammas = relaxed_gammas(lambdas, eps);
    double s = 0.0;
    double smin = std::numeric_limits<double>::infinity();
    for (double l : lambdas) {
        s += l / (2.0 - l);
        smin = std::min(smin, l / (2.0 - l));
        c.betas.push_back((2.0 - l) / l);
    }
    const double g2 = product(c.gammas) / min_of(c.gammas);
    c.Gamma = std::sqrt(g2);
    c.bracket = g2 - 1.0 / (kappa * kappa) / (s - smin);
    c.delta0_ratio = 1.0 / (2.0 * c.Gamma);
    c.start_prefactor = 1.0 / std::sqrt(max_of(c.gammas));
    finish(c);
    return c;
}

RateCertificate rate_cyclic_projections(int m, double eps, double kappa)
{
    domain(m >= 2, "rate_cyclic_projections: needs m >= 2");
    check_eps(eps, "rate_cyclic_projections");
    check_kappa(kappa, "rate_cyclic_projections");

    RateCertificate c;
    c.theorem = Theorem::CyclicProjections;
    c.params.assign(static_cast<std::size_t>(m), 1.0);
    c.eps = eps;
    c.kappa = kappa;
    c.nu = 1.0;
    c.m = m;
    c.k = m - 1;
    c.gammas.assign(static_cast<std::size_t>(m), 1.0 / (1.0 - eps));
    c.betas.assign(static_cast<std::size_t>(m), 1.0);
    const double g2 = std::pow(1.0 - eps, -(m - 1));
    c.Gamma = std::sqrt(g2);
    c.bracket = g2 - 1.0 / ((m - 1) * kappa * kappa);
    c.delta0_ratio = 1.0 / (2.0 * c.Gamma);
    c.start_prefactor = std::sqrt(1.0 - eps);
    finish(c);
    return c;
}

RateCertificate rate_convex_cyclic(const std::vector<double>& lambdas, double kappa)
{
    RateCertificate c = rate_cyclic_relaxed(lambdas, 0.0, kappa);
    c.theorem = Theorem::ConvexCyclic;
    return c;
}

RateCertificate rate_cyclic_semi_intrepid(const std::vector<double>& alphas, double eps, double kappa)
{
    const int m = static_cast<int>(alphas.size());
    domain(m >= 1, "rate_cyclic_semi_intrepid: needs at least one operator");
    for (double a : alphas) domain(a >= 0.0 && a <= 1.0, "rate_cyclic_semi_intrepid: alpha_i must lie in [0, 1]");
    check_eps(eps, "rate_cyclic_semi_intrepid");
    check_kappa(kappa, "rate_cyclic_semi_intrepid");

    RateCertificate c;
    c.theorem = Theorem::SemiIntrepid;
    c.params = alphas;
    c.eps = eps;
    c.kappa = kappa;
    c.nu = 1.0;
    c.m = m;
    for (int i = 0; i < m; ++i)
        if (alphas[static_cast<std::size_t>(i)] == 1.0) c.J.push_back(i);
    require(c.J.size() <= 1, ErrorKind::MoreThanOneFullIntrepid,
            "rate_cyclic_semi_intrepid: at most one alpha_i may equal 1");
    const int nj = static_cast<int>(c.J.size());
    domain(nj < m, "rate_cyclic_semi_intrepid: needs an operator with alpha_i < 1");
    c.k = m - 1 + nj;
    domain(c.k >= 1, "rate_cyclic_semi_intrepid: needs m >= 2 when no alpha_i equals 1");

    double s = 0.0;
    double smin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
        const auto fc = semi_intrepid_constants(alphas[static_cast<std::size_t>(i)], eps);
        c.gammas.push_back(fc.gamma);
        if (nj == 1 && c.J.front() == i) continue;
        const double a = alphas[static_cast<std::size_t>(i)];
        s += (1.0 + a) / (1.0 - a);
        smin = std::min(smin, (1.0 + a) / (1.0 - a));
        c.betas.push_back(fc.beta);
    }
    s -= (1 - nj) * smin;
    const double g2 = product(c.gammas) / std::pow(min_of(c.gammas), 1 - nj);
    c.Gamma = std::sqrt(g2);
    c.bracket = g2 - 1.0 / (kappa * kappa) / s * std::pow((1.0 + eps) / (1.0 - eps), nj);
    if (nj == 1) {
        c.delta0_ratio = std::sqrt(min_of(c.gammas)) / (2.0 * c.Gamma);
    } else {
        c.delta0_ratio = 1.0 / (2.0 * c.Gamma);
        c.start_prefactor = 1.0 / std::sqrt(max_of(c.gammas));
    }
    finish(c);
    return c;
}

RateCertificate rate_convex_semi_intrepid(const std::vector<double>& alphas, double kappa)
{
    RateCertificate c = rate_cyclic_semi_intrepid(alphas, 0.0, kappa);
    c.theorem = Theorem::ConvexSemiIntrepid;
    return c;
}

RateCertificate rate_cyclic_dr(const std::vector<double>& gammas, const std::vector<double>& betas, double nu,
                               double kappa)
{
    RateCertificate c = rate_dist_qff(gammas, betas, nu, kappa);
    c.theorem = Theorem::CyclicDR;
    c.params.clear();
    for (double b : betas) c.params.push_back(1.0 / (1.0 + b));
    return c;
}

} // namespace projlab
