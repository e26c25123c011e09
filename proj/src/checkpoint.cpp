#include "protograph/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "protograph/errors.hpp"

namespace protograph {

namespace {

constexpr char kMagic[8] = {'N', 'A', 'R', 'R', '0', '0', '0', '1'};

void write_u64(std::ostream& os, std::uint64_t v) {
  // Little-endian regardless of host order.
  for (int i = 0; i < 8; ++i) os.put(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t read_u64(std::istream& is) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) {
    int c = is.get();
    if (c == EOF) throw FormatError("checkpoint: truncated integer field");
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * i);
  }
  return v;
}

}  // namespace

void save_arrays(const std::filesystem::path& path,
                 const std::map<std::string, Eigen::MatrixXd>& arrays) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IngestionError("checkpoint: cannot open for writing: " + path.string());
  os.write(kMagic, sizeof(kMagic));
  write_u64(os, arrays.size());
  for (const auto& [name, mat] : arrays) {  // std::map: sorted manifest
    write_u64(os, name.size());
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_u64(os, static_cast<std::uint64_t>(mat.rows()));
    write_u64(os, static_cast<std::uint64_t>(mat.cols()));
    for (long r = 0; r < mat.rows(); ++r)
      for (long c = 0; c < mat.cols(); ++c) {
        double d = mat(r, c);
        std::uint64_t bits;
        static_assert(sizeof(bits) == sizeof(d));
        std::memcpy(&bits, &d, sizeof(d));
        write_u64(os, bits);
      }
  }
  if (!os) throw IngestionError("checkpoint: write failed: " + path.string());
}

std::map<std::string, Eigen::MatrixXd> load_arrays(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IngestionError("checkpoint: cannot open: " + path.string());
  char magic[8];
  is.read(magic, sizeof(magic));
  if (is.gcount() != sizeof(magic) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw FormatError("checkpoint: bad magic in " + path.string());
  std::uint64_t count = read_u64(is);
  std::map<std::string, Eigen::MatrixXd> out;
  for (std::uint64_t k = 0; k < count; ++k) {
    std::uint64_t name_len = read_u64(is);
    std::string name(name_len, '\0');
    is.read(name.data(), static_cast<std::streamsize>(name_len));
    if (is.gcount() != static_cast<std::streamsize>(name_len))
      throw FormatError("checkpoint: truncated name");
    std::uint64_t rows = read_u64(is);
    std::uint64_t cols = read_u64(is);
    Eigen::MatrixXd mat(static_cast<long>(rows), static_cast<long>(cols));
    for (std::uint64_t r = 0; r < rows; ++r)
      for (std::uint64_t c = 0; c < cols; ++c) {
        std::uint64_t bits = read_u64(is);
        double d;
        std::memcpy(&d, &bits, sizeof(d));
        mat(static_cast<long>(r), static_cast<long>(c)) = d;
      }
    if (!out.emplace(std::move(name), std::move(mat)).second)
      throw FormatError("checkpoint: duplicate array name in " + path.string());
  }
  return out;
}

}  // namespace protograph
