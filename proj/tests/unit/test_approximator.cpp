#include "metabbo/approximator.hpp"
#include "test_util.hpp"

using namespace metabbo;
using namespace metabbo::approximator;

namespace {

DenseNet random_net(Rng& rng, std::size_t layers) {
  std::vector<std::size_t> sizes;
  for (std::size_t l = 0; l <= layers; ++l) sizes.push_back(2 + rng.index(7));
  const Activation acts[] = {Activation::identity, Activation::relu, Activation::tanh, Activation::sigmoid};
  std::vector<Activation> a;
  for (std::size_t l = 0; l < layers; ++l) a.push_back(acts[rng.index(4)]);
  DenseNet net(sizes, a);
  net.initialize(rng);
  return net;
}

double weighted_output(const DenseNet& net, const Vector& x, const Vector& c) {
  const Vector y = net.forward(x);
  double s = 0;
  for (std::size_t k = 0; k < y.size(); ++k) s += c[k] * y[k];
  return s;
}

}  // namespace

TEST_CASE("forward hand examples") {
  DenseNet zero({3, 4, 2}, {Activation::relu, Activation::relu});
  CHECK(zero.forward(Vector{1, -2, 3}) == Vector{0, 0});

  DenseNet lin({1, 1}, {Activation::identity});
  lin.weight(0, 0, 0) = 2;
  lin.bias(0, 0) = 1;
  CHECK(lin.forward(Vector{3}) == Vector{7});
  CHECK_ERRC(lin.forward(Vector{1, 2}), Errc::dimension_mismatch);
}

TEST_CASE("construction") {
  CHECK_ERRC(DenseNet({3}, {}), Errc::dimension_mismatch);
  CHECK_ERRC(DenseNet({3, 2}, {Activation::relu, Activation::relu}), Errc::dimension_mismatch);
  DenseNet net({3, 4, 2}, {Activation::relu, Activation::identity});
  CHECK(net.num_parameters() == 3 * 4 + 4 + 4 * 2 + 2);
  Rng rng(1);
  net.initialize(rng);
  CHECK(net.all_finite());
  for (std::size_t o = 0; o < 4; ++o) {
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(std::abs(net.weight(0, o, i)) <= 1.0 / std::sqrt(3.0));
    }
  }
  const std::size_t hidden[] = {5, 6};
  const DenseNet mlp = make_mlp(8, hidden, 4, Activation::identity);
  CHECK(mlp.layer_sizes() == std::vector<std::size_t>{8, 5, 6, 4});
  CHECK(mlp.activations() ==
        std::vector<Activation>{Activation::relu, Activation::relu, Activation::identity});
  CHECK(parse_activation("tanh") == Activation::tanh);
  CHECK(to_string(Activation::sigmoid) == "sigmoid");
}

TEST_CASE("backward closed form on a 1-1 identity net") {
  DenseNet lin({1, 1}, {Activation::identity});
  lin.weight(0, 0, 0) = -0.7;
  lin.bias(0, 0) = 0.3;
  const double x = 1.9, g = -2.5;
  const auto grads = lin.backward(Vector{x}, Vector{g});
  // weights are stored before biases
  CHECK(grads.parameters[0] == doctest::Approx(g * x).epsilon(1e-15));
  CHECK(grads.parameters[1] == g);
  CHECK(grads.input[0] == doctest::Approx(g * -0.7).epsilon(1e-15));

  Rng rng(2);
  const DenseNet net = random_net(rng, 3);
  const auto zero = net.backward(Vector(net.input_size(), 0.4), Vector(net.output_size(), 0.0));
  for (double v : zero.parameters) CHECK(v == 0.0);
}

TEST_CASE("backward matches central finite differences on 100 random nets") {
  Rng rng(123);
  const double h = 1e-5;
  double worst = 0;
  for (int trial = 0; trial < 100; ++trial) {
    DenseNet net = random_net(rng, 3);
    Vector x(net.input_size());
    for (auto& v : x) v = rng.uniform(-1, 1);
    Vector c(net.output_size());
    for (auto& v : c) v = rng.uniform(-1, 1);
    const auto grads = net.backward(x, c);
    auto params = net.parameters();
    for (std::size_t k = 0; k < params.size(); ++k) {
      const double keep = params[k];
      params[k] = keep + h;
      const double fp = weighted_output(net, x, c);
      params[k] = keep - h;
      const double fm = weighted_output(net, x, c);
      params[k] = keep;
      const double fd = (fp - fm) / (2 * h);
      const double denom = std::max({std::abs(fd), std::abs(grads.parameters[k]), 1e-4});
      worst = std::max(worst, std::abs(fd - grads.parameters[k]) / denom);
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
      Vector xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      const double fd = (weighted_output(net, xp, c) - weighted_output(net, xm, c)) / (2 * h);
      const double denom = std::max({std::abs(fd), std::abs(grads.input[i]), 1e-4});
      worst = std::max(worst, std::abs(fd - grads.input[i]) / denom);
    }
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("backward_accumulate adds into the buffer") {
  Rng rng(4);
  const DenseNet net = random_net(rng, 2);
  const Vector x(net.input_size(), 0.2);
  const Vector g(net.output_size(), 1.0);
  Vector acc(net.num_parameters(), 0.0);
  net.backward_accumulate(x, g, acc);
  net.backward_accumulate(x, g, acc);
  const auto once = net.backward(x, g);
  for (std::size_t k = 0; k < acc.size(); ++k) CHECK(acc[k] == doctest::Approx(2 * once.parameters[k]));
}

TEST_CASE("forward determinism") {
  Rng a(9), b(9);
  const DenseNet n1 = random_net(a, 3);
  const DenseNet n2 = random_net(b, 3);
  CHECK(n1 == n2);
  const Vector x(n1.input_size(), 0.37);
  CHECK(n1.forward(x) == n2.forward(x));
}

TEST_CASE("adam") {
  SUBCASE("zero gradient is a fixed point") {
    Vector p{0.5, -1.0};
    AdamState st(2, AdamConfig{});
    for (int k = 0; k < 5; ++k) adam_step(p, Vector{0, 0}, st);
    CHECK(p == Vector{0.5, -1.0});
    CHECK(st.first_moment == Vector{0, 0});
    CHECK(st.second_moment == Vector{0, 0});
  }
  SUBCASE("first step") {
    Vector p{0.0};
    AdamState st(1, AdamConfig{});
    adam_step(p, Vector{1.0}, st);
    CHECK(st.t == 1);
    // m_hat = v_hat = 1, so the step is lr / (1 + eps)
    CHECK(std::abs(p[0] - (-1e-3 / (1.0 + 1e-8))) < 1e-18);
    CHECK(p[0] == doctest::Approx(-9.99999995e-4).epsilon(1e-7));
  }
  SUBCASE("two steps follow the hand recursion") {
    Vector p{0.0};
    AdamState st(1, AdamConfig{});
    adam_step(p, Vector{1.0}, st);
    adam_step(p, Vector{1.0}, st);
    double m = 0.1, v = 0.001;
    double expected = -1e-3 * (m / 0.1) / (std::sqrt(v / 0.001) + 1e-8);
    m = 0.9 * m + 0.1;
    v = 0.999 * v + 0.001;
    expected -= 1e-3 * (m / (1 - 0.81)) / (std::sqrt(v / (1 - 0.999 * 0.999)) + 1e-8);
    CHECK(std::abs(p[0] - expected) < 1e-15);
  }
  SUBCASE("non-finite gradient leaves state untouched") {
    Vector p{1.0};
    AdamState st(1, AdamConfig{});
    const AdamState before = st;
    CHECK_ERRC(adam_step(p, Vector{std::nan("")}, st), Errc::numeric);
    CHECK(p == Vector{1.0});
    CHECK(st == before);
  }
}
