#include "aoci/nn/recurrent_net.hpp"

#include <cmath>
#include <stdexcept>

namespace aoci::nn {

namespace {

ConstMatrixMap view(const Vector& params, Index offset, Index rows, Index cols) {
  return ConstMatrixMap(params.data() + offset, rows, cols);
}

MatrixMap view(Vector& params, Index offset, Index rows, Index cols) {
  return MatrixMap(params.data() + offset, rows, cols);
}

template <typename Derived>
auto sigmoid(const Eigen::ArrayBase<Derived>& x) {
  return 1.0 / (1.0 + (-x).exp());
}

/// tanh through the vectorized exponential; saturates correctly at +-inf.
template <typename Derived>
auto tanh_exp(const Eigen::ArrayBase<Derived>& x) {
  return 1.0 - 2.0 / ((2.0 * x).exp() + 1.0);
}

}  // namespace

HeBlock he_init(Index fan_in, Index fan_out, Rng& rng) {
  if (fan_in <= 0 || fan_out <= 0) throw std::invalid_argument("he_init: dimensions must be positive");
  const double stddev = std::sqrt(2.0 / static_cast<double>(fan_in));
  HeBlock block{Matrix(fan_out, fan_in), Vector::Zero(fan_out)};
  for (Index j = 0; j < fan_in; ++j) {
    for (Index i = 0; i < fan_out; ++i) block.weights(i, j) = stddev * standard_normal(rng);
  }
  return block;
}

Matrix DenseLayer::forward(const Vector& params, const Matrix& x) const {
  if (x.rows() != inputs) throw std::invalid_argument("DenseLayer::forward: input width mismatch");
  const auto w = view(params, weight_offset, outputs, inputs);
  const auto b = view(params, bias_offset, outputs, 1);
  Matrix out(outputs, x.cols());
  out.noalias() = w * x;
  out.colwise() += b.col(0);
  if (activation == Activation::relu) out = out.cwiseMax(0.0);
  return out;
}

void DenseLayer::backward(const Vector& params, const Matrix& x, const Matrix& out, const Matrix& dout,
                          Vector* grads, Matrix* dx) const {
  Matrix dpre = dout;
  if (activation == Activation::relu) dpre = (out.array() > 0.0).select(dout, 0.0);
  if (grads != nullptr) {
    auto gw = view(*grads, weight_offset, outputs, inputs);
    auto gb = view(*grads, bias_offset, outputs, 1);
    gw.noalias() = dpre * x.transpose();
    gb = dpre.rowwise().sum();
  }
  if (dx != nullptr) {
    const auto w = view(params, weight_offset, outputs, inputs);
    dx->noalias() = w.transpose() * dpre;
  }
}

RecurrentState RecurrentState::zeros(Index hidden, Index batch) {
  return {Matrix::Zero(hidden, batch), Matrix::Zero(hidden, batch)};
}

RecurrentNet::RecurrentNet(NetShape shape) : shape_(shape) {
  if (shape.input <= 0 || shape.dense <= 0 || shape.hidden <= 0 || shape.output <= 0) {
    throw std::invalid_argument("RecurrentNet: all widths must be positive");
  }
  Index offset = 0;
  auto add = [&](std::string name, Index rows, Index cols) {
    blocks_.push_back({std::move(name), rows, cols, offset});
    offset += rows * cols;
    return blocks_.back().offset;
  };
  const Index h = shape.hidden;
  embed_ = {shape.input, shape.dense, Activation::relu, 0, 0};
  embed_.weight_offset = add("embed.weight", shape.dense, shape.input);
  embed_.bias_offset = add("embed.bias", shape.dense, 1);
  lstm_ = {shape.dense, h, 0, 0};
  lstm_.weight_offset = add("lstm.weight", 4 * h, shape.dense + h);
  lstm_.bias_offset = add("lstm.bias", 4 * h, 1);
  head_ = {h, shape.output, Activation::identity, 0, 0};
  head_.weight_offset = add("head.weight", shape.output, h);
  head_.bias_offset = add("head.bias", shape.output, 1);
  params_ = Vector::Zero(offset);
}

void RecurrentNet::init_he(Rng& rng) {
  auto place = [&](Index w_off, Index b_off, Index fan_in, Index fan_out) {
    const auto block = he_init(fan_in, fan_out, rng);
    view(params_, w_off, fan_out, fan_in) = block.weights;
    view(params_, b_off, fan_out, 1) = block.bias;
  };
  place(embed_.weight_offset, embed_.bias_offset, embed_.inputs, embed_.outputs);
  place(lstm_.weight_offset, lstm_.bias_offset, lstm_.inputs + lstm_.hidden, 4 * lstm_.hidden);
  place(head_.weight_offset, head_.bias_offset, head_.inputs, head_.outputs);
}

Matrix RecurrentNet::forward_seq(const Matrix& inputs, Index batch, const RecurrentState* initial,
                                 SequenceCache* cache, RecurrentState* final_state) const {
  if (inputs.rows() != shape_.input) throw std::invalid_argument("forward_seq: input width mismatch");
  if (batch <= 0 || inputs.cols() % batch != 0) throw std::invalid_argument("forward_seq: columns not a multiple of batch");
  const Index steps = inputs.cols() / batch;
  const Index h = lstm_.hidden;

  RecurrentState start = initial != nullptr ? *initial : RecurrentState::zeros(h, batch);
  if (start.hidden.rows() != h || start.hidden.cols() != batch || start.cell.rows() != h || start.cell.cols() != batch) {
    throw std::invalid_argument("forward_seq: initial state shape mismatch");
  }

  Matrix dense_out = embed_.forward(params_, inputs);

  const auto w = view(params_, lstm_.weight_offset, 4 * h, lstm_.inputs + h);
  const auto bias = view(params_, lstm_.bias_offset, 4 * h, 1);
  Matrix gates(4 * h, steps * batch);
  gates.noalias() = w.leftCols(lstm_.inputs) * dense_out;
  gates.colwise() += bias.col(0);

  Matrix cells(h, steps * batch);
  Matrix cell_tanh(h, steps * batch);
  Matrix hidden(h, steps * batch);
  Matrix h_prev = start.hidden;
  Matrix c_prev = start.cell;
  Matrix pre(4 * h, batch);
  for (Index t = 0; t < steps; ++t) {
    auto g = gates.middleCols(t * batch, batch);
    pre.noalias() = w.rightCols(h) * h_prev;
    g += pre;
    g.topRows(2 * h) = sigmoid(g.topRows(2 * h).array()).matrix();
    g.middleRows(2 * h, h) = tanh_exp(g.middleRows(2 * h, h).array()).matrix();
    g.bottomRows(h) = sigmoid(g.bottomRows(h).array()).matrix();

    auto c = cells.middleCols(t * batch, batch);
    c = g.middleRows(h, h).cwiseProduct(c_prev) + g.topRows(h).cwiseProduct(g.middleRows(2 * h, h));
    auto tc = cell_tanh.middleCols(t * batch, batch);
    tc = tanh_exp(c.array()).matrix();
    auto ht = hidden.middleCols(t * batch, batch);
    ht = g.bottomRows(h).cwiseProduct(tc);
    h_prev = ht;
    c_prev = c;
  }

  Matrix output = head_.forward(params_, hidden);

  if (final_state != nullptr) *final_state = {h_prev, c_prev};
  if (cache != nullptr) {
    cache->batch = batch;
    cache->steps = steps;
    cache->input = inputs;
    cache->dense_out = std::move(dense_out);
    cache->gates = std::move(gates);
    cache->cells = std::move(cells);
    cache->cell_tanh = std::move(cell_tanh);
    cache->hidden = std::move(hidden);
    cache->initial = std::move(start);
    cache->output = output;
  }
  return output;
}

void RecurrentNet::backward_seq(const SequenceCache& cache, const Matrix& output_grads, Vector* param_grads,
                                Matrix* input_grads) const {
  const Index batch = cache.batch;
  const Index steps = cache.steps;
  const Index h = lstm_.hidden;
  if (output_grads.rows() != shape_.output || output_grads.cols() != steps * batch) {
    throw std::invalid_argument("backward_seq: output gradient shape does not match the cache");
  }
  if (cache.input.rows() != shape_.input || cache.hidden.rows() != h) {
    throw std::invalid_argument("backward_seq: cache was produced by a different network shape");
  }
  if (param_grads != nullptr) param_grads->setZero(params_.size());

  Matrix d_hidden(h, steps * batch);
  head_.backward(params_, cache.hidden, cache.output, output_grads, param_grads, &d_hidden);

  const auto w = view(params_, lstm_.weight_offset, 4 * h, lstm_.inputs + h);
  Matrix d_gates(4 * h, steps * batch);
  Matrix dh_next = Matrix::Zero(h, batch);
  Matrix dc_next = Matrix::Zero(h, batch);
  Matrix dh(h, batch), dc(h, batch);
  for (Index t = steps - 1; t >= 0; --t) {
    const auto g = cache.gates.middleCols(t * batch, batch);
    const auto tc = cache.cell_tanh.middleCols(t * batch, batch);
    const Matrix& c_prev_src = cache.cells;
    const auto i_gate = g.topRows(h).array();
    const auto f_gate = g.middleRows(h, h).array();
    const auto cand = g.middleRows(2 * h, h).array();
    const auto o_gate = g.bottomRows(h).array();

    dh = d_hidden.middleCols(t * batch, batch) + dh_next;
    dc = (dh.array() * o_gate * (1.0 - tc.array().square()) + dc_next.array()).matrix();

    auto dg = d_gates.middleCols(t * batch, batch);
    if (t > 0) {
      dg.middleRows(h, h) = (dc.array() * c_prev_src.middleCols((t - 1) * batch, batch).array() * f_gate * (1.0 - f_gate)).matrix();
    } else {
      dg.middleRows(h, h) = (dc.array() * cache.initial.cell.array() * f_gate * (1.0 - f_gate)).matrix();
    }
    dg.topRows(h) = (dc.array() * cand * i_gate * (1.0 - i_gate)).matrix();
    dg.middleRows(2 * h, h) = (dc.array() * i_gate * (1.0 - cand.square())).matrix();
    dg.bottomRows(h) = (dh.array() * tc.array() * o_gate * (1.0 - o_gate)).matrix();

    dh_next.noalias() = w.rightCols(h).transpose() * dg;
    dc_next = (dc.array() * f_gate).matrix();
  }

  if (param_grads != nullptr) {
    auto gw = view(*param_grads, lstm_.weight_offset, 4 * h, lstm_.inputs + h);
    gw.leftCols(lstm_.inputs).noalias() = d_gates * cache.dense_out.transpose();
    if (steps > 1) {
      gw.rightCols(h).noalias() = d_gates.rightCols((steps - 1) * batch) *
                                  cache.hidden.leftCols((steps - 1) * batch).transpose();
    } else {
      gw.rightCols(h).setZero();
    }
    gw.rightCols(h).noalias() += d_gates.leftCols(batch) * cache.initial.hidden.transpose();
    view(*param_grads, lstm_.bias_offset, 4 * h, 1) = d_gates.rowwise().sum();
  }

  Matrix d_dense(lstm_.inputs, steps * batch);
  d_dense.noalias() = w.leftCols(lstm_.inputs).transpose() * d_gates;
  embed_.backward(params_, cache.input, cache.dense_out, d_dense, param_grads, input_grads);
}

Vector RecurrentNet::step(const Vector& input, RecurrentState& state) const {
  RecurrentState next;
  Matrix out = forward_seq(input, 1, &state, nullptr, &next);
  state = std::move(next);
  return out.col(0);
}

}  // namespace aoci::nn
