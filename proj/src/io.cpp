#include "snse/io.hpp"

#include <json.hpp>

#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace snse {

namespace {

void write_bytes(std::ostream& os, const void* p, std::size_t n) {
    os.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

void read_bytes(std::istream& is, void* p, std::size_t n) {
    is.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (!is) throw std::runtime_error("snapshot read: truncated input");
}

}  // namespace

void write_field(std::ostream& os, const Field& u) {
    const char magic[4] = {'S', 'N', 'S', 'F'};
    write_bytes(os, magic, 4);
    const std::uint8_t dim = static_cast<std::uint8_t>(u.grid->dim());
    const std::uint8_t reserved = 0;
    const std::uint16_t n = static_cast<std::uint16_t>(u.grid->points_per_axis());
    const double L = u.grid->box_length();
    write_bytes(os, &dim, 1);
    write_bytes(os, &reserved, 1);
    write_bytes(os, &n, 2);
    write_bytes(os, &L, 8);
    for (const auto& z : u.values) {
        const double re = z.real(), im = z.imag();
        write_bytes(os, &re, 8);
        write_bytes(os, &im, 8);
    }
}

void write_field_file(const std::string& path, const Field& u) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for write: " + path);
    write_field(os, u);
}

Field read_field(std::istream& is) {
    char magic[4];
    read_bytes(is, magic, 4);
    if (std::memcmp(magic, "SNSF", 4) != 0)
        throw std::runtime_error("snapshot read: bad magic");
    std::uint8_t dim = 0, reserved = 0;
    std::uint16_t n = 0;
    double L = 0.0;
    read_bytes(is, &dim, 1);
    read_bytes(is, &reserved, 1);
    read_bytes(is, &n, 2);
    read_bytes(is, &L, 8);
    Field u(make_grid_ptr(dim, n, L));
    for (auto& z : u.values) {
        double re, im;
        read_bytes(is, &re, 8);
        read_bytes(is, &im, 8);
        z = cplx{re, im};
    }
    return u;
}

Field read_field_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open for read: " + path);
    return read_field(is);
}

void write_field_sequence(const std::string& path,
                          const std::vector<Field>& fields) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for write: " + path);
    for (const auto& f : fields) write_field(os, f);
}

std::vector<Field> read_field_sequence(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open for read: " + path);
    std::vector<Field> out;
    while (is.peek() != std::char_traits<char>::eof()) out.push_back(read_field(is));
    return out;
}

void write_scalar_jsonl(const std::string& path, const Trajectory& traj) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for write: " + path);
    os << std::setprecision(17);
    for (const auto& r : traj.scalars) {
        os << "{\"t\":" << r.t << ",\"mass\":" << r.mass
           << ",\"H\":" << r.hamiltonian << ",\"Htilde\":"
           << r.modified_hamiltonian << "}\n";
    }
}

std::uint64_t fnv1a_hash(const std::string& text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

void write_manifest(const std::string& path, const std::string& config_text,
                    const std::string& version) {
    nlohmann::json m;
    std::ostringstream hash;
    hash << std::hex << std::setw(16) << std::setfill('0')
         << fnv1a_hash(config_text);
    m["config_hash"] = hash.str();
    m["config"] = config_text;
    m["version"] = version;
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for write: " + path);
    os << m.dump(2) << "\n";
}

}  // namespace snse
