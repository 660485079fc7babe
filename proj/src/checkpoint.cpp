#include "pigan/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace pigan {

namespace {

constexpr char kMagic[4] = {'P', 'G', 'C', '1'};

void write_u32(std::ostream& os, std::uint32_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t read_u32(std::istream& is) {
  std::uint32_t v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!is) throw std::runtime_error("checkpoint: truncated file");
  return v;
}

}  // namespace

void save_checkpoint(const std::string& path,
                     const std::vector<NamedTensor>& tensors) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("checkpoint: cannot write " + path);
  os.write(kMagic, 4);
  write_u32(os, 1);
  write_u32(os, static_cast<std::uint32_t>(tensors.size()));
  for (const auto& t : tensors) {
    write_u32(os, static_cast<std::uint32_t>(t.name.size()));
    os.write(t.name.data(), static_cast<std::streamsize>(t.name.size()));
    write_u32(os, static_cast<std::uint32_t>(t.shape.size()));
    std::size_t count = 1;
    for (std::size_t d : t.shape) {
      write_u32(os, static_cast<std::uint32_t>(d));
      count *= d;
    }
    if (count != t.values.size())
      throw std::invalid_argument("checkpoint: shape does not match values for " +
                                  t.name);
    std::vector<float> data(t.values.begin(), t.values.end());
    os.write(reinterpret_cast<const char*>(data.data()),
             static_cast<std::streamsize>(sizeof(float) * data.size()));
  }
  if (!os) throw std::runtime_error("checkpoint: write failed for " + path);
}

std::vector<NamedTensor> load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("checkpoint: cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("checkpoint: bad magic in " + path);
  if (read_u32(is) != 1)
    throw std::runtime_error("checkpoint: unsupported version");
  const std::uint32_t n = read_u32(is);

  std::vector<NamedTensor> tensors(n);
  for (auto& t : tensors) {
    const std::uint32_t name_len = read_u32(is);
    t.name.resize(name_len);
    is.read(t.name.data(), name_len);
    const std::uint32_t rank = read_u32(is);
    t.shape.resize(rank);
    std::size_t count = 1;
    for (std::uint32_t i = 0; i < rank; ++i) {
      t.shape[i] = read_u32(is);
      count *= t.shape[i];
    }
    std::vector<float> data(count);
    is.read(reinterpret_cast<char*>(data.data()),
            static_cast<std::streamsize>(sizeof(float) * count));
    if (!is) throw std::runtime_error("checkpoint: truncated tensor data");
    t.values.assign(data.begin(), data.end());
  }
  return tensors;
}

}  // namespace pigan
