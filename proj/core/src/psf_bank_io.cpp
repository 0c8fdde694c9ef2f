// Kernel-bank container:
//
//   offset 0   8 bytes   magic "APSFBANK"
//   offset 8   4 bytes   header length N (uint32, little-endian)
//   offset 12  N bytes   UTF-8 JSON header
//   ...        P bytes   payload: kernel weights, float32 little-endian, row-major
//   ...        4 bytes   CRC-32 (zlib polynomial) of the payload, little-endian
//
// The header records format_version, aperture_name, depth_plan_m, sensor size,
// grid shape, block_size, payload_bytes and one entry per kernel:
// [plane, channel, block_row, block_col, height, width, offset_dx, offset_dy,
// byte_offset].

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include <json.hpp>

#include "apsim/psf_bank.hpp"

namespace apsim {

namespace {

using nlohmann::json;

constexpr char kMagic[8] = {'A', 'P', 'S', 'F', 'B', 'A', 'N', 'K'};

const char* reason_text(BankLoadError::Reason r) {
  switch (r) {
    case BankLoadError::Reason::kFormat: return "format";
    case BankLoadError::Reason::kVersion: return "version";
    case BankLoadError::Reason::kTruncated: return "truncated";
    case BankLoadError::Reason::kChecksum: return "checksum";
  }
  return "format";
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint32_t crc32_of(std::span<const std::uint8_t> bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  std::size_t done = 0;
  while (done < bytes.size()) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(bytes.size() - done, 1u << 30));
    crc = crc32(crc, bytes.data() + done, chunk);
    done += chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

[[noreturn]] void fail(BankLoadError::Reason r, const std::string& what) {
  throw BankLoadError(r, what);
}

}  // namespace

BankLoadError::BankLoadError(Reason reason, const std::string& what)
    : Error(std::string("bank_") + reason_text(reason), what), reason_(reason) {}

std::vector<std::uint8_t> serialize_bank(const PsfBank& bank) {
  json header;
  header["format_version"] = kBankFormatVersion;
  header["aperture_name"] = bank.aperture_name();
  header["depth_plan_m"] = bank.plan().distances_m;
  header["sensor"] = {{"height", bank.sensor_height()}, {"width", bank.sensor_width()}};
  header["grid"] = {{"rows", bank.block_rows()}, {"cols", bank.block_cols()}};
  header["block_size"] = bank.block_size();
  header["kernel_fields"] = {"plane", "channel", "block_row", "block_col", "height",
                             "width", "offset_dx", "offset_dy", "byte_offset"};

  std::vector<std::uint8_t> payload;
  json entries = json::array();
  for (const BankKey& key : bank.keys()) {
    const PsfKernel& k = bank.kernel(key);
    entries.push_back({key.plane, std::string(1, channel_letter(key.channel)), key.block_row,
                       key.block_col, k.height, k.width, k.offset_dx, k.offset_dy,
                       payload.size()});
    for (float w : k.weights) put_u32(payload, std::bit_cast<std::uint32_t>(w));
  }
  header["kernels"] = std::move(entries);
  header["payload_bytes"] = payload.size();

  const std::string text = header.dump();
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  put_u32(out, static_cast<std::uint32_t>(text.size()));
  out.insert(out.end(), text.begin(), text.end());
  out.insert(out.end(), payload.begin(), payload.end());
  put_u32(out, crc32_of(payload));
  return out;
}

PsfBank deserialize_bank(std::span<const std::uint8_t> bytes) {
  using R = BankLoadError::Reason;
  if (bytes.size() < sizeof(kMagic) + 4) fail(R::kTruncated, "bank file shorter than its preamble");
  if (std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) fail(R::kFormat, "bad bank magic");
  const std::size_t header_len = get_u32(bytes.data() + 8);
  const std::size_t header_end = 12 + header_len;
  if (bytes.size() < header_end) fail(R::kTruncated, "bank header truncated");

  json header;
  try {
    header = json::parse(bytes.begin() + 12, bytes.begin() + static_cast<std::ptrdiff_t>(header_end));
  } catch (const json::exception& e) {
    fail(R::kFormat, std::string("bank header is not valid JSON: ") + e.what());
  }

  try {
    const int version = header.at("format_version").get<int>();
    if (version > kBankFormatVersion || version < 1) {
      fail(R::kVersion, "unsupported bank format version " + std::to_string(version) +
                            " (this build reads up to " + std::to_string(kBankFormatVersion) + ")");
    }
    const std::size_t payload_bytes = header.at("payload_bytes").get<std::size_t>();
    if (bytes.size() < header_end + payload_bytes + 4) fail(R::kTruncated, "bank payload truncated");
    const auto payload = bytes.subspan(header_end, payload_bytes);
    if (crc32_of(payload) != get_u32(bytes.data() + header_end + payload_bytes)) {
      fail(R::kChecksum, "bank payload checksum mismatch");
    }

    DepthPlanSpec plan{header.at("depth_plan_m").get<std::vector<double>>()};
    PsfBank bank(header.at("aperture_name").get<std::string>(), std::move(plan),
                 header.at("sensor").at("height").get<int>(),
                 header.at("sensor").at("width").get<int>(), header.at("block_size").get<int>());
    if (bank.block_rows() != header.at("grid").at("rows").get<int>() ||
        bank.block_cols() != header.at("grid").at("cols").get<int>()) {
      fail(R::kFormat, "grid shape disagrees with sensor size and block size");
    }
    const auto& entries = header.at("kernels");
    if (entries.size() != bank.kernel_count()) fail(R::kFormat, "kernel count mismatch");
    for (const auto& e : entries) {
      const BankKey key{e.at(0).get<int>(), parse_channel(e.at(1).get<std::string>()),
                        e.at(2).get<int>(), e.at(3).get<int>()};
      PsfKernel k;
      k.height = e.at(4).get<int>();
      k.width = e.at(5).get<int>();
      k.offset_dx = e.at(6).get<double>();
      k.offset_dy = e.at(7).get<double>();
      const std::size_t offset = e.at(8).get<std::size_t>();
      const std::size_t n = static_cast<std::size_t>(k.height) * k.width;
      if (k.height <= 0 || k.width <= 0 || offset + n * 4 > payload.size()) {
        fail(R::kFormat, "kernel entry points outside the payload");
      }
      k.weights.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        k.weights[i] = std::bit_cast<float>(get_u32(payload.data() + offset + 4 * i));
      }
      bank.kernel(key) = std::move(k);
    }
    return bank;
  } catch (const BankLoadError&) {
    throw;
  } catch (const json::exception& e) {
    fail(R::kFormat, std::string("bank header schema violation: ") + e.what());
  } catch (const Error& e) {
    fail(R::kFormat, std::string("invalid bank: ") + e.what());
  }
}

void save_bank(const PsfBank& bank, const std::filesystem::path& path) {
  const auto bytes = serialize_bank(bank);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write bank " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing bank " + path.string());
}

PsfBank load_bank(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open bank " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_bank(bytes);
}

}  // namespace apsim
