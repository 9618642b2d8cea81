#pragma once

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "aoci/nn/recurrent_net.hpp"

namespace aoci::nn {

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct NamedArray {
  std::string name;
  NetShape shape;  // shape of the network the array belongs to
  Vector values;
};

/// On disk:
///
///   aoci-checkpoint 1
///   <key> <value>                         (any number of header lines)
///   array <name> <in> <dense> <hidden> <out> <count>
///   end
///   <raw little-endian float64 values of every array, in declaration order>
struct Checkpoint {
  std::map<std::string, std::string> header;
  std::vector<NamedArray> arrays;

  void add(const std::string& name, const RecurrentNet& net);
  /// Copies the array called `name` into `net`; shapes must match.
  void restore(const std::string& name, RecurrentNet& net) const;
  const NamedArray& find(const std::string& name) const;
};

void write_checkpoint(std::ostream& out, const Checkpoint& checkpoint);
Checkpoint read_checkpoint(std::istream& in);

void save_checkpoint(const std::string& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace aoci::nn
