// special.hpp — gamma-family special functions and beta distribution helpers.
//
// log_gamma, digamma and trigamma are hand-rolled (Lanczos / recurrence +
// asymptotic series) because they double as differentiable primitives in the
// reverse-mode engine: digamma is log_gamma's derivative and trigamma is
// digamma's.
#ifndef NETGROW_SPECIAL_HPP_
#define NETGROW_SPECIAL_HPP_

#include <vector>

namespace netgrow {

double log_gamma(double x);
double digamma(double x);
double trigamma(double x);

// log(1 + exp(x)), overflow-safe.
double softplus(double x);

double log_beta_fn(double a, double b);

// Log density of Beta(a, b) at x; -inf outside (0, 1).
double beta_log_pdf(double x, double a, double b);

// Differential entropy of Beta(a, b) in nats.
double beta_entropy(double a, double b);

// Regularized incomplete beta I_x(a, b).
double beta_cdf(double x, double a, double b);

// Inverse of beta_cdf in x for fixed (a, b).
double beta_quantile(double p, double a, double b);

// Regularized upper incomplete gamma Q(a, x).
double gamma_q(double a, double x);

// Survival function of the chi-square distribution with dof degrees of freedom.
double chi2_sf(double x, int dof);

}  // namespace netgrow

#endif  // NETGROW_SPECIAL_HPP_
