#pragma once

#include <cmath>

#include "zerotemp/errors.hpp"
#include "zerotemp/potential.hpp"
#include "zerotemp/spectral.hpp"

namespace zerotemp {

/// Two-symbol example: A = gamma on [01] and [10], 0 on [00] and [11]; B = log(1 + e^{beta eta}) on [11].
struct AppendixRecord {
    double beta = 0.0;
    double lambda_tilde = 0.0;
    double log_lambda_tilde_minus_one = 0.0;
    double pressure_pert = 0.0;  ///< log lambda_tilde
    double log_H1_pert = 0.0;
    double p0 = 0.0;  ///< perturbed mass of [0]
    double H1_unpert = 0.0;
    double pressure_unpert = 0.0;
};

inline void check_appendix_parameters(double gamma_p, double eta) {
    if (!(gamma_p < eta && eta < 0.0)) throw InvalidArgument("appendix: need gamma < eta < 0");
}

inline AppendixRecord appendix_example(double gamma_p, double eta, double beta) {
    check_appendix_parameters(gamma_p, eta);
    if (!(beta > 0.0)) throw InvalidArgument("appendix: beta must be positive");
    const double q = std::exp(2.0 * beta * (gamma_p - eta));
    const double s = std::sqrt(1.0 + 4.0 * q);
    AppendixRecord r;
    r.beta = beta;
    r.log_lambda_tilde_minus_one = beta * eta + std::log((1.0 + s) / 2.0);
    r.lambda_tilde = 1.0 + std::exp(r.log_lambda_tilde_minus_one);
    r.pressure_pert = std::log1p(std::exp(r.log_lambda_tilde_minus_one));
    r.log_H1_pert = r.log_lambda_tilde_minus_one - beta * gamma_p;
    r.p0 = 2.0 * q / ((1.0 + s) * s);
    r.pressure_unpert = std::log1p(std::exp(beta * gamma_p));
    r.H1_unpert = std::expm1(r.pressure_unpert) / std::exp(beta * gamma_p);
    return r;
}

inline LocallyConstantPotential appendix_potential(double gamma_p) {
    return two_symbol_potential(0.0, gamma_p, gamma_p, 0.0);
}

inline LocallyConstantPotential appendix_perturbation(double eta, double beta) {
    return two_symbol_potential(0.0, 0.0, 0.0, std::log1p(std::exp(beta * eta)));
}

/// Transfer-matrix values for the same quantities, for comparison with the closed forms.
struct AppendixNumeric {
    double lambda_tilde;
    double pressure_pert;
    double log_H1_pert;
    double p0;
    double H1_unpert;
    double pressure_unpert;
    double mu0_unpert;
};

inline AppendixNumeric appendix_numeric(double gamma_p, double eta, double beta) {
    check_appendix_parameters(gamma_p, eta);
    const auto a = appendix_potential(gamma_p);
    const auto b = appendix_perturbation(eta, beta);
    const PerronData pert = perron(a, beta, {}, &b);
    const PerronData plain = perron(a, beta);
    return {std::exp(pert.log_lambda()),
            pert.pressure(),
            pert.log_H()[1],
            equilibrium_cylinder_mass(pert, {0}),
            std::exp(plain.log_H()[1]),
            plain.pressure(),
            equilibrium_cylinder_mass(plain, {0})};
}

}  // namespace zerotemp
