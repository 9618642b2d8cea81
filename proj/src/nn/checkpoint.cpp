#include "aoci/nn/checkpoint.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace aoci::nn {

namespace {

constexpr const char* kMagic = "aoci-checkpoint";
constexpr int kVersion = 1;

std::uint64_t to_little_endian(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    std::uint64_t out = 0;
    for (int i = 0; i < 8; ++i) out |= ((v >> (8 * i)) & 0xffU) << (8 * (7 - i));
    return out;
  }
}

}  // namespace

void Checkpoint::add(const std::string& name, const RecurrentNet& net) {
  arrays.push_back({name, net.shape(), net.params()});
}

const NamedArray& Checkpoint::find(const std::string& name) const {
  auto it = std::find_if(arrays.begin(), arrays.end(), [&](const NamedArray& a) { return a.name == name; });
  if (it == arrays.end()) throw CheckpointError("checkpoint has no array named '" + name + "'");
  return *it;
}

void Checkpoint::restore(const std::string& name, RecurrentNet& net) const {
  const auto& array = find(name);
  if (!(array.shape == net.shape()) || array.values.size() != net.num_params()) {
    throw CheckpointError("checkpoint array '" + name + "' does not match the network shape");
  }
  net.params() = array.values;
}

void write_checkpoint(std::ostream& out, const Checkpoint& checkpoint) {
  out << kMagic << ' ' << kVersion << '\n';
  for (const auto& [key, value] : checkpoint.header) {
    if (key.find_first_of(" \n") != std::string::npos || value.find('\n') != std::string::npos) {
      throw CheckpointError("checkpoint header entries must be single tokens/lines");
    }
    out << key << ' ' << value << '\n';
  }
  for (const auto& a : checkpoint.arrays) {
    out << "array " << a.name << ' ' << a.shape.input << ' ' << a.shape.dense << ' ' << a.shape.hidden << ' '
        << a.shape.output << ' ' << a.values.size() << '\n';
  }
  out << "end\n";
  for (const auto& a : checkpoint.arrays) {
    for (Index i = 0; i < a.values.size(); ++i) {
      std::uint64_t bits = 0;
      const double v = a.values[i];
      std::memcpy(&bits, &v, sizeof bits);
      bits = to_little_endian(bits);
      out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
    }
  }
  if (!out) throw CheckpointError("failed writing checkpoint");
}

Checkpoint read_checkpoint(std::istream& in) {
  Checkpoint cp;
  std::string line;
  if (!std::getline(in, line)) throw CheckpointError("empty checkpoint");
  {
    std::istringstream ls(line);
    std::string magic;
    int version = 0;
    ls >> magic >> version;
    if (magic != kMagic || version != kVersion) throw CheckpointError("not a version-1 aoci checkpoint");
  }
  while (true) {
    if (!std::getline(in, line)) throw CheckpointError("checkpoint header is not terminated");
    if (line == "end") break;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "array") {
      NamedArray a;
      Index count = 0;
      ls >> a.name >> a.shape.input >> a.shape.dense >> a.shape.hidden >> a.shape.output >> count;
      if (!ls || count < 0) throw CheckpointError("malformed array line: " + line);
      a.values.resize(count);
      cp.arrays.push_back(std::move(a));
    } else {
      std::string value;
      std::getline(ls >> std::ws, value);
      cp.header[key] = value;
    }
  }
  for (auto& a : cp.arrays) {
    for (Index i = 0; i < a.values.size(); ++i) {
      std::uint64_t bits = 0;
      in.read(reinterpret_cast<char*>(&bits), sizeof bits);
      if (!in) throw CheckpointError("checkpoint truncated in array '" + a.name + "'");
      bits = to_little_endian(bits);
      std::memcpy(&a.values[i], &bits, sizeof bits);
    }
  }
  return cp;
}

void save_checkpoint(const std::string& path, const Checkpoint& checkpoint) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CheckpointError("cannot open " + path + " for writing");
  write_checkpoint(out, checkpoint);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open " + path);
  return read_checkpoint(in);
}

}  // namespace aoci::nn
