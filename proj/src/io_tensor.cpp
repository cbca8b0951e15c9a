#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "binpick/errors.hpp"
#include "binpick/io.hpp"

namespace binpick::io {

namespace {

constexpr char kMagic[8] = {'G', 'R', 'S', 'P', 'T', 'N', 'S', 'R'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return std::uint32_t{p[0]} | std::uint32_t{p[1]} << 8 | std::uint32_t{p[2]} << 16 | std::uint32_t{p[3]} << 24;
}

}  // namespace

std::size_t NamedTensor::element_count() const {
  std::size_t n = 1;
  for (auto d : shape) n *= static_cast<std::size_t>(d);
  return n;
}

std::vector<std::uint8_t> encode_tensors(const std::vector<NamedTensor>& tensors) {
  nlohmann::json list = nlohmann::json::array();
  std::size_t offset = 0;
  for (const auto& t : tensors) {
    if (t.shape.empty() || std::any_of(t.shape.begin(), t.shape.end(), [](auto d) { return d <= 0; }))
      throw FormatError("tensor '" + t.name + "' has a non-positive shape");
    if (t.element_count() != t.data.size()) throw FormatError("tensor '" + t.name + "' data does not match its shape");
    list.push_back({{"name", t.name}, {"dtype", "f32"}, {"shape", t.shape}, {"byte_offset", offset}});
    offset += 4 * t.data.size();
  }
  const std::string header = nlohmann::json{{"tensors", list}}.dump();

  std::vector<std::uint8_t> out(kMagic, kMagic + 8);
  put_u32(out, static_cast<std::uint32_t>(header.size()));
  out.insert(out.end(), header.begin(), header.end());
  out.reserve(out.size() + offset);
  for (const auto& t : tensors)
    for (float f : t.data) put_u32(out, std::bit_cast<std::uint32_t>(f));
  return out;
}

std::vector<NamedTensor> decode_tensors(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), kMagic, 8) != 0) throw FormatError("not a tensor container");
  const std::size_t header_len = get_u32(bytes.data() + 8);
  if (12 + header_len > bytes.size()) throw FormatError("tensor header is truncated");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.begin() + 12, bytes.begin() + 12 + static_cast<std::ptrdiff_t>(header_len));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("tensor header is not valid JSON: ") + e.what());
  }
  const std::size_t payload = 12 + header_len;
  const std::size_t payload_size = bytes.size() - payload;

  std::vector<NamedTensor> out;
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  try {
    for (const auto& entry : header.at("tensors")) {
      NamedTensor t;
      t.name = entry.at("name").get<std::string>();
      if (entry.at("dtype").get<std::string>() != "f32") throw FormatError("tensor '" + t.name + "' is not f32");
      t.shape = entry.at("shape").get<std::vector<std::int64_t>>();
      if (t.shape.empty() || std::any_of(t.shape.begin(), t.shape.end(), [](auto d) { return d <= 0; }))
        throw FormatError("tensor '" + t.name + "' has a non-positive shape");
      const auto offset = entry.at("byte_offset").get<std::size_t>();
      const std::size_t n = t.element_count();
      if (offset % 4 != 0 || offset > payload_size || 4 * n > payload_size - offset)
        throw FormatError("tensor '" + t.name + "' lies outside the payload");
      ranges.emplace_back(offset, offset + 4 * n);
      t.data.resize(n);
      const std::uint8_t* p = bytes.data() + payload + offset;
      for (std::size_t i = 0; i < n; ++i) t.data[i] = std::bit_cast<float>(get_u32(p + 4 * i));
      out.push_back(std::move(t));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed tensor header: ") + e.what());
  }
  std::sort(ranges.begin(), ranges.end());
  for (std::size_t i = 1; i < ranges.size(); ++i)
    if (ranges[i].first < ranges[i - 1].second) throw FormatError("tensor payloads overlap");
  return out;
}

void write_tensors(const std::filesystem::path& path, const std::vector<NamedTensor>& tensors) {
  write_bytes(path, encode_tensors(tensors));
}

std::vector<NamedTensor> read_tensors(const std::filesystem::path& path) { return decode_tensors(read_bytes(path)); }

const NamedTensor& find_tensor(const std::vector<NamedTensor>& tensors, std::string_view name) {
  for (const auto& t : tensors)
    if (t.name == name) return t;
  throw FormatError("missing tensor '" + std::string(name) + "'");
}

void write_depth(const std::filesystem::path& path, const DepthImage& depth) {
  const auto d = depth.data();
  write_tensors(path, {{"depth", {depth.height(), depth.width()}, std::vector<float>(d.begin(), d.end())}});
}

DepthImage read_depth(const std::filesystem::path& path) {
  const auto tensors = read_tensors(path);
  const NamedTensor& t = find_tensor(tensors, "depth");
  if (t.shape.size() != 2) throw ShapeMismatchError("depth tensor must be H x W");
  return DepthImage(static_cast<int>(t.shape[1]), static_cast<int>(t.shape[0]), t.data);
}

namespace {

NamedTensor from_tensor3(std::string name, const Tensor3& t) {
  const auto d = t.data();
  return {std::move(name), {t.channels(), t.height(), t.width()}, std::vector<float>(d.begin(), d.end())};
}

Tensor3 to_tensor3(const NamedTensor& t) {
  if (t.shape.size() != 3) throw ShapeMismatchError("tensor '" + t.name + "' must be C x H x W");
  return Tensor3(static_cast<int>(t.shape[0]), static_cast<int>(t.shape[1]), static_cast<int>(t.shape[2]), t.data);
}

}  // namespace

void write_affordance(const std::filesystem::path& path, const AffordanceBundle& b) {
  write_tensors(path, {from_tensor3("suction", b.suction), from_tensor3("finger", b.finger),
                       from_tensor3("angle", b.angle)});
}

AffordanceBundle read_affordance(const std::filesystem::path& path) {
  const auto tensors = read_tensors(path);
  AffordanceBundle b{to_tensor3(find_tensor(tensors, "suction")), to_tensor3(find_tensor(tensors, "finger")),
                     to_tensor3(find_tensor(tensors, "angle"))};
  if (b.suction.channels() != 3 || b.finger.channels() != 3 || b.angle.channels() != kAngleBins ||
      b.finger.height() != b.suction.height() || b.finger.width() != b.suction.width() ||
      b.angle.height() != b.suction.height() || b.angle.width() != b.suction.width())
    throw ShapeMismatchError("affordance tensors must be (3,H,W), (3,H,W), (12,H,W)");
  return b;
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("short write to " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  const auto bytes = read_bytes(path);
  return {bytes.begin(), bytes.end()};
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  auto tmp = path;
  tmp += ".tmp";
  write_bytes(tmp, std::vector<std::uint8_t>(text.begin(), text.end()));
  std::filesystem::rename(tmp, path);
}

std::string fnv1a_hex(const std::vector<std::uint8_t>& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (auto b : bytes) {
    h ^= b;
    h *= 0x100000001b3ull;
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) s[static_cast<std::size_t>(i)] = kHex[h & 0xf];
  return s;
}

}  // namespace binpick::io
