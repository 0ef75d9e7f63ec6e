#pragma once

#include <algorithm>
#include <bit>
#include <cstring>
#include <istream>
#include <ostream>

#include "treedec/model.hpp"

namespace treedec {

// Checkpoint layout (little endian throughout):
//   bytes 0..3   magic "TDEC"
//   u32          version (1)
//   i32 x4       vocab, embed, hidden, arity
//   u64          vocabulary hash
//   u32          parameter block count
//   per block    u64 element count, f64 x count (column major)
// Block order is the model's fixed parameter order.
namespace detail {

inline void put_bytes(std::ostream& out, const void* p, std::size_t n) {
  out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

template <class T>
void put_le(std::ostream& out, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big)
    std::reverse(bytes, bytes + sizeof(T));
  put_bytes(out, bytes, sizeof(T));
}

template <class T>
T get_le(std::istream& in) {
  unsigned char bytes[sizeof(T)];
  in.read(reinterpret_cast<char*>(bytes), sizeof(T));
  if (!in) throw std::runtime_error("checkpoint: truncated file");
  if constexpr (std::endian::native == std::endian::big)
    std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

}  // namespace detail

inline constexpr std::uint32_t kCheckpointVersion = 1;

template <class Scalar>
void save_checkpoint(std::ostream& out, const TreeDecoderModel<Scalar>& model,
                     std::uint64_t vocab_hash) {
  out.write("TDEC", 4);
  detail::put_le<std::uint32_t>(out, kCheckpointVersion);
  detail::put_le<std::int32_t>(out, model.dims.vocab);
  detail::put_le<std::int32_t>(out, model.dims.embed);
  detail::put_le<std::int32_t>(out, model.dims.hidden);
  detail::put_le<std::int32_t>(out, model.dims.arity);
  detail::put_le<std::uint64_t>(out, vocab_hash);
  auto params = model.parameters();
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(params.size()));
  for (const auto& [name, block] : params) {
    detail::put_le<std::uint64_t>(out, static_cast<std::uint64_t>(block.size()));
    for (Eigen::Index i = 0; i < block.size(); ++i)
      detail::put_le<double>(out, static_cast<double>(block[i]));
  }
  if (!out) throw std::runtime_error("checkpoint: write failed");
}

template <class Scalar>
struct LoadedCheckpoint {
  TreeDecoderModel<Scalar> model;
  std::uint64_t vocab_hash = 0;
};

template <class Scalar>
LoadedCheckpoint<Scalar> load_checkpoint(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "TDEC", 4) != 0)
    throw std::runtime_error("checkpoint: bad magic");
  const auto version = detail::get_le<std::uint32_t>(in);
  if (version != kCheckpointVersion)
    throw std::runtime_error("checkpoint: unsupported version " + std::to_string(version));
  ModelDims dims;
  dims.vocab = detail::get_le<std::int32_t>(in);
  dims.embed = detail::get_le<std::int32_t>(in);
  dims.hidden = detail::get_le<std::int32_t>(in);
  dims.arity = detail::get_le<std::int32_t>(in);

  LoadedCheckpoint<Scalar> loaded;
  loaded.vocab_hash = detail::get_le<std::uint64_t>(in);
  loaded.model.resize(dims);
  auto params = loaded.model.parameters();
  const auto blocks = detail::get_le<std::uint32_t>(in);
  if (blocks != params.size()) throw std::runtime_error("checkpoint: block count mismatch");
  for (auto& [name, block] : params) {
    const auto count = detail::get_le<std::uint64_t>(in);
    if (count != static_cast<std::uint64_t>(block.size()))
      throw std::runtime_error("checkpoint: size mismatch in block " + name);
    for (Eigen::Index i = 0; i < block.size(); ++i)
      block[i] = static_cast<Scalar>(detail::get_le<double>(in));
  }
  return loaded;
}

}  // namespace treedec
