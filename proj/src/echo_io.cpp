#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <stdexcept>

#include "sarcs/echo_sim.hpp"

namespace sarcs {

namespace io {

void put_u32(std::ostream& out, std::uint32_t v) {
    std::array<char, 4> b;
    for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(b.data(), b.size());
}

void put_u64(std::ostream& out, std::uint64_t v) {
    std::array<char, 8> b;
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(b.data(), b.size());
}

void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

std::uint32_t get_u32(std::istream& in) {
    std::array<unsigned char, 4> b{};
    if (!in.read(reinterpret_cast<char*>(b.data()), b.size())) {
        throw std::runtime_error("unexpected end of file");
    }
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

std::uint64_t get_u64(std::istream& in) {
    std::array<unsigned char, 8> b{};
    if (!in.read(reinterpret_cast<char*>(b.data()), b.size())) {
        throw std::runtime_error("unexpected end of file");
    }
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

}  // namespace io

namespace {
constexpr char kEchoMagic[8] = {'S', 'A', 'R', 'E', 'C', 'H', 'O', '1'};
}

void write_echo(const EchoMatrix& echo, std::ostream& out) {
    out.write(kEchoMagic, sizeof kEchoMagic);
    io::put_u32(out, static_cast<std::uint32_t>(echo.rows()));
    io::put_u32(out, static_cast<std::uint32_t>(echo.cols()));
    for (std::size_t m = 0; m < echo.rows(); ++m) {
        for (std::size_t n = 0; n < echo.cols(); ++n) {
            io::put_f64(out, echo.at(m, n).real());
            io::put_f64(out, echo.at(m, n).imag());
        }
    }
}

void save_echo(const EchoMatrix& echo, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_echo(echo, out);
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

EchoMatrix read_echo(std::istream& in, const RadarParams& params) {
    char magic[8];
    if (!in.read(magic, sizeof magic) || std::memcmp(magic, kEchoMagic, sizeof magic) != 0) {
        throw std::runtime_error("not an echo container (bad magic)");
    }
    const auto nr = io::get_u32(in);
    const auto na = io::get_u32(in);
    if (nr != params.range_samples || na != params.azimuth_samples) {
        throw std::runtime_error("echo is " + std::to_string(nr) + "x" + std::to_string(na) +
                                 " but the configuration expects " + std::to_string(params.range_samples) + "x" +
                                 std::to_string(params.azimuth_samples));
    }
    EchoMatrix echo(params);
    for (std::size_t m = 0; m < nr; ++m) {
        for (std::size_t n = 0; n < na; ++n) {
            const double re = io::get_f64(in);
            const double im = io::get_f64(in);
            echo.at(m, n) = {re, im};
        }
    }
    return echo;
}

EchoMatrix load_echo(const std::filesystem::path& path, const RadarParams& params) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return read_echo(in, params);
}

void save_echo_magnitude_csv(const EchoMatrix& echo, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << std::setprecision(9);
    for (std::size_t m = 0; m < echo.rows(); ++m) {
        for (std::size_t n = 0; n < echo.cols(); ++n) {
            if (n) out << ',';
            out << std::abs(echo.at(m, n));
        }
        out << '\n';
    }
}

}  // namespace sarcs
