// Copyright (C) 2026 The TAL Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "tal/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "tal/error.hpp"

namespace tal {

namespace {

class Writer {
 public:
  void bytes(const void* p, std::size_t n) { out_.append(static_cast<const char*>(p), n); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
  }
  void f64(double d) {
    const auto v = std::bit_cast<std::uint64_t>(d);
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
  }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(const std::string& in) : in_(in) {}

  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) throw FormatError("checkpoint truncated");
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in_[pos_ + i])) << (8 * i);
    }
    pos_ += 4;
    return v;
  }
  double f64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in_[pos_ + i])) << (8 * i);
    }
    pos_ += 8;
    return std::bit_cast<double>(v);
  }
  std::string bytes(std::size_t n) {
    need(n);
    std::string out = in_.substr(pos_, n);
    pos_ += n;
    return out;
  }
  bool done() const { return pos_ == in_.size(); }

 private:
  const std::string& in_;
  std::size_t pos_ = 0;
};

std::uint32_t narrow(std::size_t v) {
  if (v > std::numeric_limits<std::uint32_t>::max()) throw FormatError("value exceeds u32 range");
  return static_cast<std::uint32_t>(v);
}

void write_params(Writer& w, const Mlp& net) {
  for (const DenseLayer& layer : net.layers()) {
    for (double v : layer.weights.data) w.f64(v);
    for (double v : layer.bias) w.f64(v);
  }
}

void read_params(Reader& r, Mlp& net) {
  for (DenseLayer& layer : net.layers()) {
    for (double& v : layer.weights.data) v = r.f64();
    for (double& v : layer.bias) v = r.f64();
  }
}

}  // namespace

std::string serialize_checkpoint(const TrainingState& state) {
  Writer w;
  w.bytes(kCheckpointMagic, sizeof kCheckpointMagic);
  w.u32(kCheckpointVersion);
  const auto& dims = state.model.dims();
  w.u32(narrow(dims.size() - 1));
  for (std::size_t d : dims) w.u32(narrow(d));
  w.u32(narrow(state.queue.capacity()));
  w.u32(narrow(state.queue.size()));
  w.u32(state.epoch);
  w.u32(state.queue.initialized() ? 1u : 0u);
  write_params(w, state.model);
  write_params(w, state.velocity);
  for (const FeatureStats& s : state.queue.entries()) {
    w.f64(s.mean);
    w.f64(s.variance);
  }
  std::ostringstream rng;
  rng << state.rng;
  const std::string rng_text = rng.str();
  w.u32(narrow(rng_text.size()));
  w.bytes(rng_text.data(), rng_text.size());
  return w.take();
}

TrainingState deserialize_checkpoint(const std::string& bytes) {
  Reader r(bytes);
  const std::string magic = r.bytes(sizeof kCheckpointMagic);
  if (std::memcmp(magic.data(), kCheckpointMagic, sizeof kCheckpointMagic) != 0) {
    throw FormatError("not a checkpoint: bad magic bytes");
  }
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion) {
    throw FormatError("unsupported checkpoint version " + std::to_string(version));
  }
  const std::uint32_t layer_count = r.u32();
  if (layer_count < 2 || layer_count > 64) throw FormatError("implausible layer count");
  std::vector<std::size_t> dims(layer_count + 1);
  for (std::size_t& d : dims) {
    d = r.u32();
    if (d == 0 || d > (1u << 20)) throw FormatError("implausible layer width");
  }
  const std::uint32_t capacity = r.u32();
  const std::uint32_t queue_len = r.u32();
  const std::uint32_t epoch = r.u32();
  const std::uint32_t flags = r.u32();
  if (capacity == 0 || queue_len > capacity) throw FormatError("inconsistent queue header");
  if (flags > 1) throw FormatError("unknown checkpoint flags");

  Mlp model;
  Mlp velocity;
  try {
    model = Mlp(dims);
    velocity = Mlp(dims);
  } catch (const InvalidInputError& e) {
    throw FormatError(std::string("bad architecture: ") + e.what());
  }
  r.need(8 * 2 * model.parameter_count());
  read_params(r, model);
  read_params(r, velocity);

  HistoricalFeatureQueue queue(capacity);
  for (std::uint32_t i = 0; i < queue_len; ++i) {
    FeatureStats s;
    s.mean = r.f64();
    s.variance = r.f64();
    queue.push(s);
  }
  if (flags & 1u) queue.mark_initialized();

  const std::uint32_t rng_len = r.u32();
  std::istringstream rng_text(r.bytes(rng_len));
  std::mt19937_64 rng;
  rng_text >> rng;
  if (rng_text.fail()) throw FormatError("corrupt random-generator state");
  if (!r.done()) throw FormatError("trailing bytes after checkpoint");

  return TrainingState{std::move(model), std::move(velocity), std::move(queue), epoch, rng};
}

void save_checkpoint(const TrainingState& state, const std::filesystem::path& path) {
  const std::string bytes = serialize_checkpoint(state);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot open " + path.string() + " for writing");
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error("failed writing " + path.string());
}

TrainingState load_checkpoint(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path.string());
  std::ostringstream buf;
  buf << f.rdbuf();
  return deserialize_checkpoint(buf.str());
}

}  // namespace tal
