#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "propspan/model.hpp"

namespace propspan {

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parameter checkpoint: "PSCK" magic, format version, the four dims as
// u32, then every parameter array as raw little-endian doubles in the
// param_arrays order. Round-trips bit-exact.
namespace detail {

inline constexpr char kCheckpointMagic[4] = {'P', 'S', 'C', 'K'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) {
    out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
}

inline std::uint32_t get_u32(const std::string& data, std::size_t& pos) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= std::uint32_t(static_cast<unsigned char>(data[pos + i])) << (8 * i);
  }
  pos += 4;
  return v;
}

}  // namespace detail

inline void save_checkpoint(const ModelParams& params,
                            const std::filesystem::path& path) {
  std::string out;
  out.append(detail::kCheckpointMagic, 4);
  detail::put_u32(out, detail::kCheckpointVersion);
  detail::put_u32(out, static_cast<std::uint32_t>(params.dims.vocab_buckets));
  detail::put_u32(out, static_cast<std::uint32_t>(params.dims.embed_dim));
  detail::put_u32(out, static_cast<std::uint32_t>(params.dims.hidden_dim));
  detail::put_u32(out, static_cast<std::uint32_t>(params.dims.window));

  ModelParams& mutable_params = const_cast<ModelParams&>(params);
  for (const auto& [data, size] : detail::param_arrays(mutable_params)) {
    const std::size_t bytes = size * sizeof(double);
    const std::size_t at = out.size();
    out.resize(at + bytes);
    std::memcpy(out.data() + at, data, bytes);
  }

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) {
    throw CheckpointError("cannot open checkpoint for writing: " +
                          path.string());
  }
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) {
    throw CheckpointError("failed to write checkpoint: " + path.string());
  }
}

inline ModelParams load_checkpoint(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) {
    throw CheckpointError("cannot open checkpoint: " + path.string());
  }
  std::string data((std::istreambuf_iterator<char>(file)),
                   std::istreambuf_iterator<char>());

  if (data.size() < 24 ||
      std::memcmp(data.data(), detail::kCheckpointMagic, 4) != 0) {
    throw CheckpointError("not a checkpoint file: " + path.string());
  }
  std::size_t pos = 4;
  const std::uint32_t version = detail::get_u32(data, pos);
  if (version != detail::kCheckpointVersion) {
    throw CheckpointError("unsupported checkpoint version " +
                          std::to_string(version));
  }
  ModelDims dims;
  dims.vocab_buckets = detail::get_u32(data, pos);
  dims.embed_dim = detail::get_u32(data, pos);
  dims.hidden_dim = detail::get_u32(data, pos);
  dims.window = detail::get_u32(data, pos);
  if (dims.vocab_buckets == 0 || dims.embed_dim == 0 || dims.hidden_dim == 0) {
    throw CheckpointError("checkpoint has degenerate dimensions");
  }

  ModelParams params = zero_params(dims);
  for (const auto& [dest, size] : detail::param_arrays(params)) {
    const std::size_t bytes = size * sizeof(double);
    if (pos + bytes > data.size()) {
      throw CheckpointError("checkpoint truncated: " + path.string());
    }
    std::memcpy(dest, data.data() + pos, bytes);
    pos += bytes;
  }
  if (pos != data.size()) {
    throw CheckpointError("checkpoint has trailing bytes: " + path.string());
  }
  return params;
}

}  // namespace propspan
