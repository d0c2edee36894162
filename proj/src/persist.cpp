#include "scg/persist.hpp"

#include <unistd.h>

#include <fstream>
#include <random>
#include <sstream>

#include "scg/errors.hpp"

namespace scg {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void atomic_write_file(const std::filesystem::path& path,
                       const std::string& content) {
    std::filesystem::path dir = path.parent_path();
    if (!dir.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
    }

    static thread_local std::mt19937_64 rng(std::random_device{}());
    std::filesystem::path tmp =
        path.string() + ".tmp-" + std::to_string(::getpid()) + "-" +
        std::to_string(rng() & 0xffffff);
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ParseError("cannot write " + tmp.string());
        out << content;
        out.close();
        if (!out) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw ParseError("short write to " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw ParseError("cannot move " + tmp.string() + " into place: " +
                         ec.message());
    }
}

}  // namespace scg
