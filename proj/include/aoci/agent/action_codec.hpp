#pragma once

#include <memory>
#include <string>
#include <vector>

#include "aoci/actspace.hpp"

namespace aoci::agent {

/// Maps a continuous primitive action onto the valid-action space.
class ActionCodec {
 public:
  virtual ~ActionCodec() = default;

  /// Upper bounds of the primitive components; the dimension is sizes().size().
  virtual const std::vector<double>& sizes() const = 0;
  virtual ValidAction decode(const PrimitiveAction& primitive) const = 0;
  virtual std::string name() const = 0;

  int dims() const { return static_cast<int>(sizes().size()); }
};

/// One component per CSP subspace: floor, clamp, and the zero-collapse mapping.
class DecomposedCodec final : public ActionCodec {
 public:
  explicit DecomposedCodec(ActionSpaces spaces);

  const std::vector<double>& sizes() const override { return sizes_; }
  ValidAction decode(const PrimitiveAction& primitive) const override;
  std::string name() const override { return "adm"; }

 private:
  ActionSpaces spaces_;
  std::vector<double> sizes_;
};

/// A single component over (0, |A|) read as the canonical action index.
class FlatCodec final : public ActionCodec {
 public:
  explicit FlatCodec(ActionSpaces spaces);

  const std::vector<double>& sizes() const override { return sizes_; }
  ValidAction decode(const PrimitiveAction& primitive) const override;
  std::string name() const override { return "flat"; }

 private:
  ActionSpaces spaces_;
  std::vector<double> sizes_;
};

}  // namespace aoci::agent
