#include "synesthete/io_util.hpp"

#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <system_error>

#include "synesthete/errors.hpp"

namespace synesthete {

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error("read failed: " + path.string());
  return buf.str();
}

void write_text_atomic(const std::filesystem::path& path,
                       std::string_view content) {
  namespace fs = std::filesystem;
  const fs::path dir = path.has_parent_path() ? path.parent_path() : ".";

  std::random_device rd;
  const fs::path tmp =
      dir / (path.filename().string() + ".tmp" + std::to_string(rd()));

  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot create temp file: " + tmp.string());
    out.write(content.data(),
              static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw Error("write failed: " + tmp.string());
    }
  }

  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error("rename failed for " + path.string() + ": " + ec.message());
  }
}

}  // namespace synesthete
