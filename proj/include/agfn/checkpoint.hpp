//
// Project agfn - Copyright 2026 The agfn Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef AGFN_CHECKPOINT_HPP_
#define AGFN_CHECKPOINT_HPP_

#include <array>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "agfn/autodiff.hpp"

namespace agfn {

class CheckpointError: public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Layout, all integers little-endian:
//   "AGFNCKPT" u32 version u64 config_hash u64 step u32 tensor_count
//   per tensor: u32 name_len, name, u32 rank, u32 dims[rank],
//               f32 data (row-major)
inline constexpr std::array<char, 8> kCheckpointMagic { 'A', 'G', 'F', 'N',
                                                        'C', 'K', 'P', 'T' };
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Tensor {
  std::string name;
  std::vector<std::uint32_t> dims;
  std::vector<float> data;
};

struct Checkpoint {
  std::uint64_t config_hash = 0;
  std::uint64_t step = 0;
  std::vector<Tensor> tensors;

  const Tensor *find(const std::string &name) const {
    for (const Tensor &t: tensors) {
      if (t.name == name)
        return &t;
    }
    return nullptr;
  }
};

namespace internal {

template <class T>
void put_le(std::ostream &out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i)
    out.put(static_cast<char>((v >> (8 * i)) & 0xFF));
}

template <class T>
T get_le(std::istream &in) {
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    const int c = in.get();
    if (c == std::char_traits<char>::eof())
      throw CheckpointError("truncated checkpoint");
    v |= static_cast<T>(static_cast<unsigned char>(c)) << (8 * i);
  }
  return v;
}

}  // namespace internal

inline Tensor to_tensor(const std::string &name, const ad::Mat &m) {
  Tensor t { name,
             { static_cast<std::uint32_t>(m.rows()),
               static_cast<std::uint32_t>(m.cols()) },
             {} };
  t.data.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      t.data.push_back(static_cast<float>(m(r, c)));
  }
  return t;
}

inline ad::Mat to_matrix(const Tensor &t) {
  if (t.dims.size() != 2)
    throw CheckpointError("tensor " + t.name + " is not a matrix");
  ad::Mat m(t.dims[0], t.dims[1]);
  std::size_t i = 0;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      m(r, c) = t.data[i++];
  }
  return m;
}

inline void write_checkpoint(std::ostream &out, const Checkpoint &ck) {
  out.write(kCheckpointMagic.data(), kCheckpointMagic.size());
  internal::put_le<std::uint32_t>(out, kCheckpointVersion);
  internal::put_le<std::uint64_t>(out, ck.config_hash);
  internal::put_le<std::uint64_t>(out, ck.step);
  internal::put_le<std::uint32_t>(out,
                                  static_cast<std::uint32_t>(ck.tensors.size()));
  for (const Tensor &t: ck.tensors) {
    std::size_t n = 1;
    for (auto d: t.dims)
      n *= d;
    if (n != t.data.size())
      throw CheckpointError("tensor " + t.name + " size mismatch");
    internal::put_le<std::uint32_t>(out,
                                    static_cast<std::uint32_t>(t.name.size()));
    out.write(t.name.data(), static_cast<std::streamsize>(t.name.size()));
    internal::put_le<std::uint32_t>(out,
                                    static_cast<std::uint32_t>(t.dims.size()));
    for (auto d: t.dims)
      internal::put_le<std::uint32_t>(out, d);
    for (float f: t.data)
      internal::put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(f));
  }
}

inline Checkpoint read_checkpoint(std::istream &in) {
  std::array<char, 8> magic {};
  in.read(magic.data(), magic.size());
  if (!in || magic != kCheckpointMagic)
    throw CheckpointError("not a checkpoint file");
  const auto version = internal::get_le<std::uint32_t>(in);
  if (version != kCheckpointVersion)
    throw CheckpointError("unsupported checkpoint version "
                          + std::to_string(version));
  Checkpoint ck;
  ck.config_hash = internal::get_le<std::uint64_t>(in);
  ck.step = internal::get_le<std::uint64_t>(in);
  const auto count = internal::get_le<std::uint32_t>(in);
  for (std::uint32_t i = 0; i < count; ++i) {
    Tensor t;
    const auto len = internal::get_le<std::uint32_t>(in);
    if (len > (1U << 16))
      throw CheckpointError("implausible tensor name length");
    t.name.resize(len);
    in.read(t.name.data(), len);
    const auto rank = internal::get_le<std::uint32_t>(in);
    if (rank > 8)
      throw CheckpointError("implausible tensor rank");
    std::uint64_t n = 1;
    for (std::uint32_t r = 0; r < rank; ++r) {
      t.dims.push_back(internal::get_le<std::uint32_t>(in));
      n *= t.dims.back();
    }
    if (n > (1ULL << 32))
      throw CheckpointError("implausible tensor size");
    t.data.resize(static_cast<std::size_t>(n));
    for (float &f: t.data)
      f = std::bit_cast<float>(internal::get_le<std::uint32_t>(in));
    ck.tensors.push_back(std::move(t));
  }
  if (in.peek() != std::char_traits<char>::eof())
    throw CheckpointError("trailing bytes after checkpoint");
  return ck;
}

inline void save_checkpoint(const std::string &path, const Checkpoint &ck) {
  // Write to a side file first so a crash never leaves a torn checkpoint.
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw CheckpointError("cannot write " + tmp);
    write_checkpoint(out, ck);
    if (!out)
      throw CheckpointError("write failed: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw CheckpointError("cannot rename " + tmp + " to " + path);
}

inline Checkpoint load_checkpoint(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw CheckpointError("cannot open checkpoint " + path);
  return read_checkpoint(in);
}

inline void check_config_hash(const Checkpoint &ck, std::uint64_t expected,
                              bool force) {
  if (ck.config_hash != expected && !force) {
    std::ostringstream msg;
    msg << "checkpoint config hash " << std::hex << ck.config_hash
        << " does not match config " << expected << " (use --force)";
    throw CheckpointError(msg.str());
  }
}

inline void append_params(Checkpoint &ck, const ad::ParamSet &ps,
                          const std::string &prefix = "") {
  for (const ad::Param &p: ps.all())
    ck.tensors.push_back(to_tensor(prefix + p.name, p.value));
}

// Copies every parameter from the checkpoint; names and shapes must match.
inline void restore_params(ad::ParamSet &ps, const Checkpoint &ck,
                           const std::string &prefix = "") {
  for (ad::Param &p: ps.all()) {
    const Tensor *t = ck.find(prefix + p.name);
    if (t == nullptr)
      throw CheckpointError("checkpoint lacks tensor " + prefix + p.name);
    ad::Mat m = to_matrix(*t);
    if (m.rows() != p.value.rows() || m.cols() != p.value.cols())
      throw CheckpointError("shape mismatch for " + p.name);
    p.value = std::move(m);
  }
}

}  // namespace agfn

#endif  // AGFN_CHECKPOINT_HPP_
