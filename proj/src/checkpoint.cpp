#include "bagnet/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <unordered_map>

#include "bagnet/errors.hpp"

namespace bagnet::nn {

namespace {

constexpr char kMagic[8] = {'B', 'A', 'G', 'N', 'E', 'T', '0', '1'};

void write_u64(std::ostream& out, std::uint64_t v) {
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(buf), 8);
}

void write_f64(std::ostream& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  write_u64(out, bits);
}

std::uint64_t read_u64(std::istream& in) {
  unsigned char buf[8];
  in.read(reinterpret_cast<char*>(buf), 8);
  if (!in) throw DataError("checkpoint: truncated file");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | buf[i];
  return v;
}

double read_f64(std::istream& in) {
  const std::uint64_t bits = read_u64(in);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

}  // namespace

void save_checkpoint(const std::string& path,
                     const std::vector<const Parameter*>& params) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("checkpoint: cannot open " + path + " for writing");
  out.write(kMagic, 8);
  write_u64(out, params.size());
  for (const Parameter* p : params) {
    p->value.ensure_finite("parameter " + p->name);
    write_u64(out, p->name.size());
    out.write(p->name.data(), static_cast<std::streamsize>(p->name.size()));
    write_u64(out, p->value.rank());
    for (std::size_t d : p->value.shape()) write_u64(out, d);
    for (std::size_t i = 0; i < p->value.size(); ++i) write_f64(out, p->value[i]);
  }
  if (!out) throw DataError("checkpoint: write failed for " + path);
}

std::vector<std::pair<std::string, Tensor>> load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("checkpoint: cannot open " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0)
    throw DataError("checkpoint: bad magic in " + path);
  const std::uint64_t count = read_u64(in);
  std::vector<std::pair<std::string, Tensor>> result;
  result.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::uint64_t name_len = read_u64(in);
    std::string name(name_len, '\0');
    in.read(name.data(), static_cast<std::streamsize>(name_len));
    if (!in) throw DataError("checkpoint: truncated name");
    const std::uint64_t rank = read_u64(in);
    std::vector<std::size_t> shape(rank);
    std::size_t total = 1;
    for (std::uint64_t r = 0; r < rank; ++r) {
      shape[r] = static_cast<std::size_t>(read_u64(in));
      total *= shape[r];
    }
    std::vector<double> values(total);
    for (std::size_t j = 0; j < total; ++j) values[j] = read_f64(in);
    result.emplace_back(std::move(name), Tensor(std::move(shape), std::move(values)));
  }
  return result;
}

void load_checkpoint_into(const std::string& path,
                          const std::vector<Parameter*>& params) {
  auto entries = load_checkpoint(path);
  std::unordered_map<std::string, Tensor*> by_name;
  for (auto& [name, tensor] : entries) by_name[name] = &tensor;
  for (Parameter* p : params) {
    auto it = by_name.find(p->name);
    if (it == by_name.end())
      throw DataError("checkpoint: missing parameter " + p->name);
    if (!it->second->same_shape(p->value))
      throw DataError("checkpoint: shape mismatch for parameter " + p->name);
    p->value = *it->second;
    p->zero_grad();
  }
}

}  // namespace bagnet::nn
