#include "eme/hybridizer.hpp"

#include <cmath>

#include "eme/errors.hpp"

namespace eme {

namespace {

int sign_of(double x) { return (x > 0) - (x < 0); }

} // namespace

std::vector<std::string> validate(const BareModel& m) {
    if (!(m.omega_bar_a > 0)) throw InvalidModel("omega_bar_a must be positive");
    if (!(m.omega_bar_c > 0)) throw InvalidModel("omega_bar_c must be positive");
    if (!std::isfinite(m.g)) throw InvalidModel("g must be finite");
    if (!(m.epsilon >= 0) || !(m.epsilon < 1)) throw InvalidModel("epsilon must lie in [0, 1)");
    std::vector<std::string> warnings;
    if (m.epsilon > 0.3) warnings.push_back("epsilon above 0.3; first-order corrections may be unreliable");
    return warnings;
}

HybridizationResult hybridize(const BareModel& m) {
    validate(m);
    const double wa = m.omega_bar_a;
    const double wc = m.omega_bar_c;
    const double root = std::sqrt(wa * wc);
    const double num = 4.0 * m.g * root;
    const double den = wc * wc - wa * wa;

    HybridizationResult h;
    // Principal branch of tan(2 theta) = num/den so that theta -> 0 with g; equal bare
    // frequencies take the pi/4 branch.
    if (den != 0.0)
        h.theta = 0.5 * std::atan(num / den);
    else
        h.theta = (m.g == 0.0) ? 0.0 : std::copysign(M_PI / 4.0, m.g);

    const double c = std::cos(h.theta);
    const double s = std::sin(h.theta);
    const double s2th = std::sin(2.0 * h.theta);
    const double rad_a = wa * wa * c * c + wc * wc * s * s - 2.0 * m.g * root * s2th;
    const double rad_c = wc * wc * c * c + wa * wa * s * s + 2.0 * m.g * root * s2th;
    if (!(rad_a > 0) || !(rad_c > 0))
        throw ModeCollapse("normal-mode frequency radicand is non-positive at g = " + std::to_string(m.g));

    h.omega_a = std::sqrt(rad_a);
    h.omega_c = std::sqrt(rad_c);
    h.s1 = std::pow(wc / wa, 0.25);
    h.s2 = std::pow(rad_a / (wa * wc), 0.25);
    h.s3 = std::pow(rad_c / (wa * wc), 0.25);

    Eigen::Matrix2d rot;
    rot << c, s, -s, c;
    h.u = Eigen::Vector2d(h.s1, 1.0 / h.s1).asDiagonal() * rot * Eigen::Vector2d(h.s2, h.s3).asDiagonal();
    h.v = Eigen::Vector2d(1.0 / h.s1, h.s1).asDiagonal() * rot * Eigen::Vector2d(1.0 / h.s2, 1.0 / h.s3).asDiagonal();
    return h;
}

SignTable sign_table(const HybridizationResult& h) {
    return {sign_of(h.u_aa()), sign_of(h.u_ac()), sign_of(h.u_ca()), sign_of(h.u_cc()),
            sign_of(h.v_aa()), sign_of(h.v_ac()), sign_of(h.v_ca()), sign_of(h.v_cc())};
}

SignTable sign_table(const BareModel& m) { return sign_table(hybridize(m)); }

double symplectic_residual(const HybridizationResult& h) {
    return (h.u * h.v.transpose() - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff();
}

double quadratic_form_residual(const BareModel& m, const HybridizationResult& h) {
    // Bare H2 = (1/4) X^T diag(wa, wc) X + (1/4) Y^T [[wa, 2g], [2g, wc]] Y.
    Eigen::Matrix2d kx = Eigen::Vector2d(m.omega_bar_a, m.omega_bar_c).asDiagonal();
    Eigen::Matrix2d ky;
    ky << m.omega_bar_a, 2.0 * m.g, 2.0 * m.g, m.omega_bar_c;
    Eigen::Matrix2d target = Eigen::Vector2d(h.omega_a, h.omega_c).asDiagonal();
    const double rx = (h.u.transpose() * kx * h.u - target).cwiseAbs().maxCoeff();
    const double ry = (h.v.transpose() * ky * h.v - target).cwiseAbs().maxCoeff();
    return std::max(rx, ry);
}

nlohmann::ordered_json to_json(const HybridizationResult& h) {
    nlohmann::ordered_json j;
    j["omega_a"] = h.omega_a;
    j["omega_c"] = h.omega_c;
    j["theta"] = h.theta;
    j["s1"] = h.s1;
    j["s2"] = h.s2;
    j["s3"] = h.s3;
    j["u_aa"] = h.u_aa();
    j["u_ac"] = h.u_ac();
    j["u_ca"] = h.u_ca();
    j["u_cc"] = h.u_cc();
    j["v_aa"] = h.v_aa();
    j["v_ac"] = h.v_ac();
    j["v_ca"] = h.v_ca();
    j["v_cc"] = h.v_cc();
    return j;
}

HybridizationResult hybridization_from_json(const nlohmann::ordered_json& j) {
    HybridizationResult h;
    h.omega_a = j.at("omega_a").get<double>();
    h.omega_c = j.at("omega_c").get<double>();
    h.theta = j.at("theta").get<double>();
    h.s1 = j.at("s1").get<double>();
    h.s2 = j.at("s2").get<double>();
    h.s3 = j.at("s3").get<double>();
    h.u << j.at("u_aa").get<double>(), j.at("u_ac").get<double>(), j.at("u_ca").get<double>(),
        j.at("u_cc").get<double>();
    h.v << j.at("v_aa").get<double>(), j.at("v_ac").get<double>(), j.at("v_ca").get<double>(),
        j.at("v_cc").get<double>();
    return h;
}

} // namespace eme
