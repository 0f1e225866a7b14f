#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "dsm/error.hpp"
#include "dsm/ingest.hpp"

namespace dsm::ingest {

namespace {

static_assert(std::endian::native == std::endian::little,
              "NIfTI reader assumes a little-endian host");

constexpr std::size_t kHeaderSize = 348;
constexpr std::size_t kOffDim = 40;
constexpr std::size_t kOffDatatype = 70;
constexpr std::size_t kOffBitpix = 72;
constexpr std::size_t kOffPixdim = 76;
constexpr std::size_t kOffVoxOffset = 108;
constexpr std::size_t kOffSclSlope = 112;
constexpr std::size_t kOffSclInter = 116;
constexpr std::size_t kOffMagic = 344;

template <typename T>
T load(const std::vector<char>& buf, std::size_t offset) {
  T v;
  std::memcpy(&v, buf.data() + offset, sizeof(T));
  return v;
}

template <typename T>
void store(std::vector<char>& buf, std::size_t offset, T v) {
  std::memcpy(buf.data() + offset, &v, sizeof(T));
}

}  // namespace

NiftiVolume4D read_nifti(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingFile, "cannot open " + path.string());
  const std::vector<char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() < kHeaderSize)
    throw Error(ErrorCode::TruncatedData, path.string() + " is shorter than a NIfTI-1 header");

  if (load<std::int32_t>(buf, 0) != static_cast<std::int32_t>(kHeaderSize) ||
      std::memcmp(buf.data() + kOffMagic, "n+1\0", 4) != 0)
    throw Error(ErrorCode::BadMagic, path.string() + " is not a little-endian single-file NIfTI-1");

  NiftiVolume4D vol;
  const auto ndim = load<std::int16_t>(buf, kOffDim);
  if (ndim < 1 || ndim > 7) throw Error(ErrorCode::BadMagic, "invalid dim[0] in " + path.string());
  std::size_t dims[4] = {1, 1, 1, 1};
  for (int i = 0; i < 4 && i < ndim; ++i) {
    const auto d = load<std::int16_t>(buf, kOffDim + 2 * (i + 1));
    if (d < 1) throw Error(ErrorCode::BadMagic, "non-positive dimension in " + path.string());
    dims[i] = static_cast<std::size_t>(d);
  }
  for (int i = 4; i < ndim; ++i) {
    if (load<std::int16_t>(buf, kOffDim + 2 * (i + 1)) > 1)
      throw Error(ErrorCode::UnsupportedDatatype, "volumes beyond 4 dimensions are not supported");
  }
  vol.nx = dims[0];
  vol.ny = dims[1];
  vol.nz = dims[2];
  vol.nt = dims[3];

  const auto datatype = load<std::int16_t>(buf, kOffDatatype);
  std::size_t bytes = 0;
  if (datatype == static_cast<std::int16_t>(NiftiDatatype::Float32)) {
    vol.datatype = NiftiDatatype::Float32;
    bytes = 4;
  } else if (datatype == static_cast<std::int16_t>(NiftiDatatype::Int16)) {
    vol.datatype = NiftiDatatype::Int16;
    bytes = 2;
  } else {
    throw Error(ErrorCode::UnsupportedDatatype, "datatype code " + std::to_string(datatype));
  }

  vol.vox_offset = load<float>(buf, kOffVoxOffset);
  vol.scl_slope = load<float>(buf, kOffSclSlope);
  vol.scl_inter = load<float>(buf, kOffSclInter);
  if (!std::isfinite(vol.vox_offset) || vol.vox_offset < 0.0f)
    throw Error(ErrorCode::BadMagic, "invalid vox_offset in " + path.string());
  const double slope = (vol.scl_slope == 0.0f || !std::isfinite(vol.scl_slope)) ? 1.0 : vol.scl_slope;
  const double inter = std::isfinite(vol.scl_inter) ? vol.scl_inter : 0.0;

  const std::size_t offset = static_cast<std::size_t>(vol.vox_offset);
  const std::size_t count = vol.nx * vol.ny * vol.nz * vol.nt;
  if (buf.size() < offset + count * bytes)
    throw Error(ErrorCode::TruncatedData, path.string() + ": expected " +
                                              std::to_string(count * bytes) + " data bytes");

  vol.data.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double raw = vol.datatype == NiftiDatatype::Float32
                           ? static_cast<double>(load<float>(buf, offset + 4 * i))
                           : static_cast<double>(load<std::int16_t>(buf, offset + 2 * i));
    vol.data[i] = raw * slope + inter;
  }
  return vol;
}

void write_nifti(const NiftiVolume4D& vol, const std::filesystem::path& path) {
  const std::size_t count = vol.nx * vol.ny * vol.nz * vol.nt;
  if (count == 0 || vol.data.size() != count)
    throw Error(ErrorCode::DimMismatch, "volume data does not match its dimensions");
  for (auto d : {vol.nx, vol.ny, vol.nz, vol.nt}) {
    if (d > 32767) throw Error(ErrorCode::InvalidParameter, "dimension exceeds NIfTI-1 int16 range");
  }
  const std::size_t bytes = vol.datatype == NiftiDatatype::Float32 ? 4 : 2;
  const std::size_t offset = 352;

  std::vector<char> buf(offset + count * bytes, 0);
  store<std::int32_t>(buf, 0, static_cast<std::int32_t>(kHeaderSize));
  store<std::int16_t>(buf, kOffDim, vol.nt > 1 ? 4 : 3);
  store<std::int16_t>(buf, kOffDim + 2, static_cast<std::int16_t>(vol.nx));
  store<std::int16_t>(buf, kOffDim + 4, static_cast<std::int16_t>(vol.ny));
  store<std::int16_t>(buf, kOffDim + 6, static_cast<std::int16_t>(vol.nz));
  store<std::int16_t>(buf, kOffDim + 8, static_cast<std::int16_t>(vol.nt));
  for (int i = 5; i < 8; ++i) store<std::int16_t>(buf, kOffDim + 2 * i, 1);
  store<std::int16_t>(buf, kOffDatatype, static_cast<std::int16_t>(vol.datatype));
  store<std::int16_t>(buf, kOffBitpix, static_cast<std::int16_t>(bytes * 8));
  for (int i = 0; i < 8; ++i) store<float>(buf, kOffPixdim + 4 * i, 1.0f);
  store<float>(buf, kOffVoxOffset, static_cast<float>(offset));
  store<float>(buf, kOffSclSlope, vol.scl_slope);
  store<float>(buf, kOffSclInter, vol.scl_inter);
  std::memcpy(buf.data() + kOffMagic, "n+1\0", 4);

  const double slope = vol.scl_slope == 0.0f ? 1.0 : vol.scl_slope;
  for (std::size_t i = 0; i < count; ++i) {
    if (vol.datatype == NiftiDatatype::Float32) {
      store<float>(buf, offset + 4 * i, static_cast<float>(vol.data[i]));
    } else {
      const double raw = std::round((vol.data[i] - vol.scl_inter) / slope);
      if (raw < -32768.0 || raw > 32767.0)
        throw Error(ErrorCode::InvalidParameter, "value out of int16 range after scaling");
      store<std::int16_t>(buf, offset + 2 * i, static_cast<std::int16_t>(raw));
    }
  }

  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

}  // namespace dsm::ingest
