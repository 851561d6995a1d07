#include "tnkit/io.hpp"

#include <json.hpp>

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tnkit {

static_assert(std::endian::native == std::endian::little, "serialization assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'T', 'N', 'K', 'T'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

class Reader {
 public:
  explicit Reader(std::string data) : data_(std::move(data)) {}
  template <class T>
  T get() {
    if (pos_ + sizeof(T) > data_.size()) throw std::runtime_error("load: truncated file");
    T v;
    std::memcpy(&v, data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  bool done() const { return pos_ == data_.size(); }

 private:
  std::string data_;
  std::size_t pos_ = 0;
};

std::string encode(std::uint32_t kind, const std::vector<DenseTensor>& cores, std::int64_t center) {
  std::string out(kMagic, 4);
  put(out, kVersion);
  put(out, kind);
  put<std::uint64_t>(out, cores.size());
  put(out, center);
  for (const auto& c : cores) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(c.rank()));
    for (Index d : c.dims()) put<std::uint64_t>(out, d);
    for (const Scalar& v : c.data()) {
      put(out, v.real());
      put(out, v.imag());
    }
  }
  return out;
}

std::vector<DenseTensor> decode(const std::string& path, std::uint32_t expected_kind, std::int64_t& center) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  Reader r(ss.str());
  char magic[4];
  for (char& ch : magic) ch = r.get<char>();
  if (std::memcmp(magic, kMagic, 4) != 0) throw std::runtime_error("load: bad magic in " + path);
  if (r.get<std::uint32_t>() != kVersion) throw std::runtime_error("load: unsupported version in " + path);
  if (r.get<std::uint32_t>() != expected_kind) throw std::runtime_error("load: container holds a different kind");
  const auto n = r.get<std::uint64_t>();
  center = r.get<std::int64_t>();
  std::vector<DenseTensor> cores;
  for (std::uint64_t k = 0; k < n; ++k) {
    const auto rank = r.get<std::uint32_t>();
    if (rank > 8) throw std::runtime_error("load: implausible core rank");
    std::vector<Index> dims(rank);
    for (auto& d : dims) d = r.get<std::uint64_t>();
    std::vector<Scalar> data(product(dims));
    for (auto& v : data) {
      const double re = r.get<double>();
      const double im = r.get<double>();
      v = {re, im};
    }
    cores.emplace_back(std::move(dims), std::move(data));
  }
  if (!r.done()) throw std::runtime_error("load: trailing bytes in " + path);
  return cores;
}

}  // namespace

void write_file_atomic(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      std::filesystem::remove(tmp);
      throw std::runtime_error("write failed for " + path);
    }
  }
  std::filesystem::rename(tmp, path);
}

std::string train_metadata_json(const TensorTrain& tt) {
  nlohmann::json j;
  j["kind"] = "tensor_train";
  j["sites"] = tt.size();
  j["physical_extents"] = tt.physical_dims();
  j["bond_extents"] = tt.bond_dims();
  j["center"] = tt.center() ? nlohmann::json(*tt.center()) : nlohmann::json(nullptr);
  return j.dump(2) + "\n";
}

void save_train(const TensorTrain& tt, const std::string& path) {
  const std::int64_t center = tt.center() ? static_cast<std::int64_t>(*tt.center()) : -1;
  write_file_atomic(path, encode(0, tt.cores(), center));
  write_file_atomic(path + ".json", train_metadata_json(tt));
}

TensorTrain load_train(const std::string& path) {
  std::int64_t center = -1;
  auto cores = decode(path, 0, center);
  std::optional<Index> c;
  if (center >= 0) c = static_cast<Index>(center);
  return TensorTrain(std::move(cores), c);
}

void save_operator(const TensorTrainOperator& op, const std::string& path) {
  write_file_atomic(path, encode(1, op.cores(), -1));
  nlohmann::json j;
  j["kind"] = "tensor_train_operator";
  j["sites"] = op.size();
  std::vector<Index> outs, ins;
  for (Index k = 0; k < op.size(); ++k) {
    outs.push_back(op.out_dim(k));
    ins.push_back(op.in_dim(k));
  }
  j["out_extents"] = outs;
  j["in_extents"] = ins;
  j["bond_extents"] = op.bond_dims();
  write_file_atomic(path + ".json", j.dump(2) + "\n");
}

TensorTrainOperator load_operator(const std::string& path) {
  std::int64_t center = -1;
  return TensorTrainOperator(decode(path, 1, center));
}

}  // namespace tnkit
