#include <doctest.h>

#include <cmath>

#include "shockshell/ode.hpp"
#include "shockshell/spline.hpp"

using namespace shockshell;

TEST_CASE("DOPRI reproduces exp and a harmonic oscillator in both directions") {
  ode::Options<double> opt;
  auto decay = [](double, const Eigen::Matrix<double, 1, 1>& y) { return Eigen::Matrix<double, 1, 1>(-y[0]); };
  auto r = ode::integrate(decay, 0.0, Eigen::Matrix<double, 1, 1>(1.0), 3.0, opt);
  CHECK(r.status == ode::Status::Completed);
  CHECK(r.y[0] == doctest::Approx(std::exp(-3.0)).epsilon(1e-9));
  auto back = ode::integrate(decay, 3.0, r.y, 0.0, opt);
  CHECK(back.y[0] == doctest::Approx(1.0).epsilon(1e-9));

  auto osc = [](double, const Eigen::Vector2d& y) { return Eigen::Vector2d(y[1], -y[0]); };
  auto o = ode::integrate(osc, 0.0, Eigen::Vector2d(0.0, 1.0), 10.0, opt);
  CHECK(o.y[0] == doctest::Approx(std::sin(10.0)).epsilon(1e-8));
  CHECK(o.y[1] == doctest::Approx(std::cos(10.0)).epsilon(1e-8));
}

TEST_CASE("dense sampler emits every requested abscissa") {
  ode::Options<double> opt;
  auto osc = [](double, const Eigen::Vector2d& y) { return Eigen::Vector2d(y[1], -y[0]); };
  const Eigen::VectorXd xs = Eigen::VectorXd::LinSpaced(41, 0.0, 4.0);
  double worst = 0.0;
  auto sink = [&](std::size_t, double x, const Eigen::Vector2d& y) {
    worst = std::max(worst, std::abs(y[0] - std::sin(x)));
    return true;
  };
  ode::DenseSampler<double, 2, decltype(sink)> sampler(xs, 1.0, sink);
  ode::integrate(osc, 0.0, Eigen::Vector2d(0.0, 1.0), 4.0, opt,
                 [&](const ode::DenseStep<double, 2>& s) { return sampler(s); });
  CHECK(sampler.emitted() == 41);
  CHECK(worst < 1e-8);
}

TEST_CASE("observer can stop the integration") {
  ode::Options<double> opt;
  auto grow = [](double, const Eigen::Matrix<double, 1, 1>& y) { return Eigen::Matrix<double, 1, 1>(y[0]); };
  auto r = ode::integrate(grow, 0.0, Eigen::Matrix<double, 1, 1>(1.0), 10.0, opt,
                          [](const ode::DenseStep<double, 1>& s) { return s.y_end()[0] < 100.0; });
  CHECK(r.status == ode::Status::Stopped);
  CHECK(r.x < 10.0);
}

TEST_CASE("step underflow is reported near a blow-up") {
  ode::Options<double> opt;
  auto blow = [](double, const Eigen::Matrix<double, 1, 1>& y) { return Eigen::Matrix<double, 1, 1>(y[0] * y[0]); };
  auto r = ode::integrate(blow, 0.0, Eigen::Matrix<double, 1, 1>(1.0), 2.0, opt);
  CHECK(r.status != ode::Status::Completed);
}

TEST_CASE("cubic spline is fourth order and reproduces cubics") {
  auto err_at = [](int n) {
    const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(n, 0.0, 2.0);
    const Eigen::VectorXd y = x.array().sin();
    const CubicSpline s(x, y);
    double e = 0;
    for (int i = 0; i <= 1000; ++i) {
      const double t = 2.0 * i / 1000;
      e = std::max(e, std::abs(s(t) - std::sin(t)));
    }
    return e;
  };
  CHECK(std::log2(err_at(17) / err_at(33)) == doctest::Approx(4.0).epsilon(0.15));

  const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(9, -1.0, 1.0);
  const Eigen::VectorXd y = x.array().cube() - 2 * x.array();
  const CubicSpline s(x, y);
  CHECK(s(0.3) == doctest::Approx(0.027 - 0.6).epsilon(1e-12));
  CHECK(s.derivative(0.3) == doctest::Approx(3 * 0.09 - 2).epsilon(1e-12));
}

TEST_CASE("spline accepts descending knots") {
  const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(33, 2.0, 1.0);
  const Eigen::VectorXd y = x.array().exp();
  const CubicSpline s(x, y);
  CHECK(s(1.5) == doctest::Approx(std::exp(1.5)).epsilon(1e-8));
}
