#include <doctest.h>

#include <cmath>
#include <cstring>

#include "hardinv/common/errors.hpp"
#include "hardinv/nncore/adam.hpp"
#include "hardinv/nncore/grad_check.hpp"
#include "hardinv/nncore/loss.hpp"
#include "hardinv/nncore/model_io.hpp"
#include "helpers.hpp"

using namespace hardinv;
using hardinv::testing::identity_net;
using hardinv::testing::random_matrix;
using hardinv::testing::random_net;

TEST_CASE("elu") {
  CHECK(elu(0.0) == 0.0);
  CHECK(elu(2.5) == 2.5);
  CHECK(elu(-1.0) == doctest::Approx(std::exp(-1.0) - 1.0).epsilon(1e-15));
  CHECK(elu(-1.0) == doctest::Approx(-0.6321205588).epsilon(1e-10));
}

TEST_CASE("matrix rejects non-finite values and bad sizes") {
  CHECK_THROWS_AS(Matrix(2, 2, std::vector<double>{1, 2, 3}), DimensionError);
  CHECK_THROWS_AS(Matrix(1, 2, std::vector<double>{1, NAN}), NonFiniteError);
  CHECK_THROWS_AS(Matrix(1, 1, INFINITY), NonFiniteError);
}

TEST_CASE("forward of a zero network is zero") {
  const Mlp net({5, 8, 3}, OutputMode::linear);
  const Matrix y = predict(net, random_matrix(4, 5, 1));
  CHECK(y == Matrix(4, 3));
}

TEST_CASE("hand-built identity network passes values through the skips") {
  const Mlp net = identity_net();
  const Matrix y = predict(net, Matrix::from_rows({{3.0}}));
  CHECK(y(0, 0) == 3.0);

  // L = y, so dL/dx = 1 by the chain rule through proj, skips, head.
  const ForwardResult fwd = forward(net, Matrix::from_rows({{3.0}}));
  const GradientTape tape = backward(net, fwd.cache, Matrix::from_rows({{1.0}}));
  CHECK(tape.input_grad(0, 0) == 1.0);
}

TEST_CASE("forward rejects mismatched input width") {
  const Mlp net({3, 4, 1}, OutputMode::linear);
  CHECK_THROWS_AS(predict(net, Matrix(2, 4)), DimensionError);
}

TEST_CASE("batched forward equals stacked single-row forwards exactly") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Mlp net = random_net({7, 16, 3}, seed % 2 ? OutputMode::linear : OutputMode::sigmoid, seed);
    const Matrix x = random_matrix(9, 7, 100 + seed);
    const Matrix batched = predict(net, x);
    for (std::size_t r = 0; r < x.rows(); ++r) {
      const Matrix single = predict(net, x.slice_rows(r, 1));
      for (std::size_t c = 0; c < 3; ++c) CHECK(single(0, c) == batched(r, c));
    }
  }
}

TEST_CASE("residual identity: zero hidden blocks give head(proj(x))") {
  Mlp net = random_net({4, 6, 2}, OutputMode::linear, 11);
  {
    const auto layers = net.mutable_layers();
    for (std::size_t b = 1; b <= Mlp::kResidualBlocks; ++b) {
      layers[b].weight = Matrix(6, 6);
      layers[b].bias.assign(6, 0.0);
    }
  }
  const Matrix x = random_matrix(3, 4, 12);
  const Matrix y = predict(net, x);
  const LinearLayer& proj = net.layer(0);
  const LinearLayer& head = net.layer(Mlp::kLayerCount - 1);
  for (std::size_t i = 0; i < 3; ++i) {
    std::vector<double> h(6);
    for (std::size_t j = 0; j < 6; ++j) {
      double acc = proj.bias[j];
      for (std::size_t k = 0; k < 4; ++k) acc += x(i, k) * proj.weight(j, k);
      h[j] = acc;
    }
    for (std::size_t o = 0; o < 2; ++o) {
      double acc = head.bias[o];
      for (std::size_t j = 0; j < 6; ++j) acc += h[j] * head.weight(o, j);
      CHECK(y(i, o) == acc);
    }
  }
}

TEST_CASE("sigmoid output stays in the open unit interval") {
  Mlp net = random_net({3, 8, 5}, OutputMode::sigmoid, 3);
  // Blow up the head so the logistic saturates.
  for (double& w : net.mutable_layers()[Mlp::kLayerCount - 1].weight.values()) w *= 1e4;
  const Matrix y = predict(net, random_matrix(50, 3, 4, -5, 5));
  for (double v : y.values()) {
    CHECK(v > 0.0);
    CHECK(v < 1.0);
  }
}

TEST_CASE("zero cotangent gives exactly zero gradients") {
  const Mlp net = random_net({4, 8, 2}, OutputMode::sigmoid, 5);
  const ForwardResult fwd = forward(net, random_matrix(3, 4, 6));
  const GradientTape tape = backward(net, fwd.cache, Matrix(3, 2));
  for (const LinearLayer& g : tape.layers) {
    for (double v : g.weight.values()) CHECK(v == 0.0);
    for (double v : g.bias) CHECK(v == 0.0);
  }
  for (double v : tape.input_grad.values()) CHECK(v == 0.0);
}

TEST_CASE("backward rejects a stale or foreign cache") {
  Mlp net = random_net({2, 4, 1}, OutputMode::linear, 7);
  const Mlp other = net;
  const ForwardResult fwd = forward(net, random_matrix(2, 2, 8));
  CHECK_THROWS_AS(backward(other, fwd.cache, Matrix(2, 1)), ContractError);
  CHECK_THROWS_AS(backward(net, fwd.cache, Matrix(3, 1)), DimensionError);
  net.mutable_layers()[0].bias[0] += 1.0;
  CHECK_THROWS_AS(backward(net, fwd.cache, Matrix(2, 1)), ContractError);
}

// Test-local finite differences for L = mean(y^2), independent of grad_check().
TEST_CASE("parameter gradients match a hand-rolled central difference") {
  const Mlp net = random_net({3, 5, 2}, OutputMode::linear, 21);
  const Matrix x = random_matrix(4, 3, 22);
  const auto loss = [&](const Mlp& n) {
    const Matrix y = predict(n, x);
    double s = 0.0;
    for (double v : y.values()) s += v * v;
    return s / static_cast<double>(y.size());
  };
  const ForwardResult fwd = forward(net, x);
  const GradientTape tape = backward(net, fwd.cache, mse(fwd.output, Matrix(4, 2)).grad);
  const double h = 1e-5;
  for (std::size_t l = 0; l < Mlp::kLayerCount; ++l) {
    for (std::size_t i = 0; i < net.layer(l).weight.size(); ++i) {
      Mlp plus = net;
      Mlp minus = net;
      plus.mutable_layers()[l].weight.values()[i] += h;
      minus.mutable_layers()[l].weight.values()[i] -= h;
      const double numeric = (loss(plus) - loss(minus)) / (2 * h);
      CHECK(tape.layers[l].weight.values()[i] == doctest::Approx(numeric).epsilon(1e-6).scale(1.0));
    }
  }
}

TEST_CASE("grad_check on random networks") {
  for (const std::size_t h : {4, 8, 16}) {
    for (const OutputMode mode : {OutputMode::linear, OutputMode::sigmoid}) {
      const Mlp net = random_net({5, h, 3}, mode, 1000 + h);
      const Matrix x = random_matrix(3, 5, 2000 + h);
      CHECK(grad_check(net, x, CheckLoss::mean_square) < 1e-4);
      CHECK(grad_check(net, x, CheckLoss::sum) < 1e-4);
    }
  }
}

TEST_CASE("grad_check of a zero network at zero input is exactly zero") {
  const Mlp net({3, 4, 2}, OutputMode::linear);
  CHECK(grad_check(net, Matrix(2, 3), CheckLoss::mean_square) == 0.0);
}

TEST_CASE("mse") {
  const LossValue same = mse(Matrix::from_rows({{1, 2}}), Matrix::from_rows({{1, 2}}));
  CHECK(same.loss == 0.0);
  CHECK(same.grad == Matrix(1, 2));

  const LossValue v = mse(Matrix::from_rows({{1, 2}}), Matrix::from_rows({{0, 0}}));
  CHECK(v.loss == 2.5);
  CHECK(v.grad(0, 0) == 1.0);
  CHECK(v.grad(0, 1) == 2.0);

  CHECK_THROWS_AS(mse(Matrix(1, 2), Matrix(2, 1)), DimensionError);

  // Finite differences on random pairs.
  const Matrix p = random_matrix(3, 4, 31);
  const Matrix t = random_matrix(3, 4, 32);
  const LossValue lv = mse(p, t);
  for (std::size_t i = 0; i < p.size(); ++i) {
    Matrix a = p;
    Matrix b = p;
    a.values()[i] += 1e-6;
    b.values()[i] -= 1e-6;
    const double numeric = (mse(a, t).loss - mse(b, t).loss) / 2e-6;
    CHECK(lv.grad.values()[i] == doctest::Approx(numeric).epsilon(1e-6));
  }
}

TEST_CASE("adam_step") {
  SUBCASE("zero gradients leave parameters and moments untouched") {
    Mlp net = random_net({3, 4, 2}, OutputMode::linear, 41);
    const Mlp before = net;
    AdamState state = AdamState::for_network(net);
    const AdamState fresh = state;
    adam_step(net, zero_tape(net), state);
    CHECK(net == before);
    CHECK(state.step_count == 1);
    CHECK(state.first_moment == fresh.first_moment);
    CHECK(state.second_moment == fresh.second_moment);
  }
  SUBCASE("first step with unit gradient moves by about -lr") {
    Mlp net({1, 1, 1}, OutputMode::linear);
    GradientTape tape = zero_tape(net);
    for (LinearLayer& g : tape.layers) {
      g.weight(0, 0) = 1.0;
      g.bias[0] = 1.0;
    }
    AdamState state = AdamState::for_network(net, AdamConfig{.lr = 0.1});
    adam_step(net, tape, state);
    // m_hat = 1, v_hat = 1 after bias correction: step = 0.1 / (1 + 1e-8).
    for (const LinearLayer& l : net.layers()) {
      CHECK(l.weight(0, 0) == doctest::Approx(-0.1).epsilon(1e-7));
      CHECK(l.bias[0] == doctest::Approx(-0.1).epsilon(1e-7));
    }
  }
  SUBCASE("identical inputs give identical updates") {
    Mlp a = random_net({3, 4, 2}, OutputMode::linear, 42);
    Mlp b = a;
    const ForwardResult fwd = forward(a, random_matrix(5, 3, 43));
    const GradientTape tape = backward(a, fwd.cache, mse(fwd.output, Matrix(5, 2)).grad);
    AdamState sa = AdamState::for_network(a);
    AdamState sb = AdamState::for_network(b);
    adam_step(a, tape, sa);
    adam_step(b, tape, sb);
    CHECK(a.digest() == b.digest());
  }
  SUBCASE("frozen networks refuse updates") {
    Mlp net({1, 2, 1}, OutputMode::linear);
    AdamState state = AdamState::for_network(net);
    net.freeze();
    CHECK_THROWS_AS(adam_step(net, zero_tape(net), state), ContractError);
  }
}

TEST_CASE("init") {
  const MlpShape shape{13, 16, 1};
  const Mlp a = Mlp::init(shape, OutputMode::linear, 9);
  const Mlp b = Mlp::init(shape, OutputMode::linear, 9);
  const Mlp c = Mlp::init(shape, OutputMode::linear, 10);
  CHECK(a.digest() == b.digest());
  CHECK(a == b);
  CHECK_FALSE(a == c);
  for (const LinearLayer& l : a.layers()) {
    const double limit = 1.0 / std::sqrt(static_cast<double>(l.in_width()));
    for (double w : l.weight.values()) CHECK(std::abs(w) <= limit);
    for (double v : l.bias) CHECK(v == 0.0);
  }
}

TEST_CASE("soft update moves the target toward the source") {
  const Mlp source = random_net({2, 4, 2}, OutputMode::linear, 51);
  Mlp target = random_net({2, 4, 2}, OutputMode::linear, 52);
  double prev = parameter_distance(target, source);
  for (int i = 0; i < 5; ++i) {
    soft_update(target, source, 0.005);
    const double d = parameter_distance(target, source);
    CHECK(d < prev);
    prev = d;
  }
  soft_update(target, source, 1.0);
  CHECK(target == source);
  CHECK_THROWS_AS(soft_update(target, source, 0.0), ContractError);
}

TEST_CASE("model JSON round-trips bit-exactly") {
  for (std::uint64_t seed = 60; seed < 64; ++seed) {
    const Mlp net = random_net({13, 8, 2}, seed % 2 ? OutputMode::sigmoid : OutputMode::linear, seed);
    const Mlp back = mlp_from_json(Json::parse(dump_json(mlp_to_json(net))));
    CHECK(back == net);
    CHECK(back.digest() == net.digest());
  }
}

TEST_CASE("model JSON validation") {
  const Json good = mlp_to_json(random_net({2, 3, 1}, OutputMode::linear, 70));
  Json bad_shape = good;
  bad_shape["layers"][1]["bias"].push_back(0.0);
  CHECK_THROWS_AS(mlp_from_json(bad_shape), IngestError);

  Json non_finite = good;
  non_finite["layers"][0]["weight"][0][0] = nullptr;  // how NaN serializes
  CHECK_THROWS_AS(mlp_from_json(non_finite), IngestError);

  Json bad_version = good;
  bad_version["schema_version"] = 2;
  CHECK_THROWS_AS(mlp_from_json(bad_version), IngestError);

  Json few_layers = good;
  few_layers["layers"].erase(0);
  CHECK_THROWS_AS(mlp_from_json(few_layers), IngestError);
}
