#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "aoci/rng.hpp"

namespace aoci::nn {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using MatrixMap = Eigen::Map<Matrix>;
using ConstMatrixMap = Eigen::Map<const Matrix>;

enum class Activation { identity, relu };

/// A named slice of a flat parameter vector, viewed as a column-major matrix.
struct ParamBlock {
  std::string name;
  Index rows = 0;
  Index cols = 0;
  Index offset = 0;

  Index count() const { return rows * cols; }
};

struct HeBlock {
  Matrix weights;  // [fan_out x fan_in]
  Vector bias;     // [fan_out], zero
};

/// Weights ~ Normal(0, 2 / fan_in), biases zero.
HeBlock he_init(Index fan_in, Index fan_out, Rng& rng);

/// Fully connected layer over a flat parameter vector.
struct DenseLayer {
  Index inputs = 0;
  Index outputs = 0;
  Activation activation = Activation::identity;
  Index weight_offset = 0;
  Index bias_offset = 0;

  Matrix forward(const Vector& params, const Matrix& x) const;
  /// `out` is this layer's forward output for `x`; gradients go to `grads`
  /// (when non-null) and the input gradient to `dx` (when non-null).
  void backward(const Vector& params, const Matrix& x, const Matrix& out, const Matrix& dout, Vector* grads,
                Matrix* dx) const;
};

/// LSTM with the four gate blocks stacked as rows of one
/// [4 * hidden x (inputs + hidden)] matrix in the order input, forget,
/// candidate, output.
struct LstmLayer {
  Index inputs = 0;
  Index hidden = 0;
  Index weight_offset = 0;
  Index bias_offset = 0;
};

/// Hidden and cell vectors for a batch of sequences, one column each.
struct RecurrentState {
  Matrix hidden;
  Matrix cell;

  static RecurrentState zeros(Index hidden, Index batch);
};

/// Everything backward_seq needs from one forward pass.
struct SequenceCache {
  Index batch = 0;
  Index steps = 0;
  Matrix input;      // [in x T*B]
  Matrix dense_out;  // [dense x T*B]
  Matrix gates;      // [4H x T*B], post-activation
  Matrix cells;      // [H x T*B]
  Matrix cell_tanh;  // [H x T*B]
  Matrix hidden;     // [H x T*B]
  RecurrentState initial;
  Matrix output;     // [out x T*B]
};

struct NetShape {
  Index input = 0;
  Index dense = 128;
  Index hidden = 128;
  Index output = 1;

  bool operator==(const NetShape&) const = default;
};

/// Rectifier FCL -> LSTM -> linear FCL, unrolled over time-major column
/// blocks: column t * batch + b is step t of sequence b.
class RecurrentNet {
 public:
  explicit RecurrentNet(NetShape shape);

  const NetShape& shape() const { return shape_; }
  Index num_params() const { return params_.size(); }
  Vector& params() { return params_; }
  const Vector& params() const { return params_; }
  const std::vector<ParamBlock>& blocks() const { return blocks_; }

  void init_he(Rng& rng);

  /// Runs `inputs.cols() / batch` steps. A null `initial` means zero state.
  Matrix forward_seq(const Matrix& inputs, Index batch, const RecurrentState* initial = nullptr,
                     SequenceCache* cache = nullptr, RecurrentState* final_state = nullptr) const;

  /// Exact backpropagation through time of the scalar loss whose gradient
  /// with respect to the outputs is `output_grads`. `param_grads` is
  /// overwritten when non-null; so is `input_grads`.
  void backward_seq(const SequenceCache& cache, const Matrix& output_grads, Vector* param_grads,
                    Matrix* input_grads) const;

  /// One step for a single sequence, advancing `state`.
  Vector step(const Vector& input, RecurrentState& state) const;

 private:
  NetShape shape_;
  DenseLayer embed_;
  LstmLayer lstm_;
  DenseLayer head_;
  std::vector<ParamBlock> blocks_;
  Vector params_;
};

}  // namespace aoci::nn
