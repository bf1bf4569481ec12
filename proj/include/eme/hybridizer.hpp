#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace eme {

// Bare transmon (a) coupled to one cavity mode (c) through g Y_a Y_c.
struct BareModel {
    double omega_bar_a = 0.8;
    double omega_bar_c = 1.0;
    double g = 0.0;
    double epsilon = 0.0;
};

// Throws InvalidModel on violated preconditions; returns soft warnings (e.g. large epsilon).
std::vector<std::string> validate(const BareModel& m);

struct HybridizationResult {
    double omega_a = 0.0;
    double omega_c = 0.0;
    double theta = 0.0;
    double s1 = 1.0;
    double s2 = 1.0;
    double s3 = 1.0;
    // Rows are the bare modes (a, c), columns the normal modes (a, c):
    // X_bare = u * X_normal, Y_bare = v * Y_normal.
    Eigen::Matrix2d u = Eigen::Matrix2d::Identity();
    Eigen::Matrix2d v = Eigen::Matrix2d::Identity();

    double u_aa() const { return u(0, 0); }
    double u_ac() const { return u(0, 1); }
    double u_ca() const { return u(1, 0); }
    double u_cc() const { return u(1, 1); }
    double v_aa() const { return v(0, 0); }
    double v_ac() const { return v(0, 1); }
    double v_ca() const { return v(1, 0); }
    double v_cc() const { return v(1, 1); }
};

HybridizationResult hybridize(const BareModel& m);

struct SignTable {
    int u_aa = 0, u_ac = 0, u_ca = 0, u_cc = 0;
    int v_aa = 0, v_ac = 0, v_ca = 0, v_cc = 0;
};

SignTable sign_table(const BareModel& m);
SignTable sign_table(const HybridizationResult& h);

// Largest |u v^T - 1| entry.
double symplectic_residual(const HybridizationResult& h);

// Largest off-diagonal entry of the quadratic form after mapping the bare H2 into normal modes,
// together with the deviation of the diagonal from (omega_a, omega_c).
double quadratic_form_residual(const BareModel& m, const HybridizationResult& h);

nlohmann::ordered_json to_json(const HybridizationResult& h);
HybridizationResult hybridization_from_json(const nlohmann::ordered_json& j);

} // namespace eme
