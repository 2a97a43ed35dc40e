#pragma once

#include <string>
#include <utility>
#include <vector>

namespace concrisk {

// Nelson-Siegel-Svensson zero curve, continuously compounded.
struct NssParams {
    double beta0 = 0.0;
    double beta1 = 0.0;
    double beta2 = 0.0;
    double beta3 = 0.0;
    double tau1 = 1.0;
    double tau2 = 1.0;
};

double zero_rate(const NssParams& p, double t);
double discount_factor(const NssParams& p, double t);

struct CurveObservations {
    std::vector<double> maturities;
    std::vector<double> rates;
};
CurveObservations load_curve(const std::string& path);

struct CurveFit {
    NssParams params;
    double rmse = 0.0;
};

// Linear least squares over the betas at each candidate (tau1, tau2) from a
// coarse grid, then simplex refinement of the taus.
CurveFit fit_nss(const CurveObservations& obs);

}  // namespace concrisk
