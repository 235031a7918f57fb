#include "csdnls/app/trajectory_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace csdnls::app {

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    if (res.ec != std::errc()) throw std::runtime_error("cannot format number");
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& token) {
    double x = 0;
    const char* end = token.data() + token.size();
    const auto res = std::from_chars(token.data(), end, x);
    if (res.ec != std::errc() || res.ptr != end) throw std::runtime_error("bad number in trajectory: '" + token + "'");
    return x;
}

void write_trajectory(std::ostream& os, const TrajectoryRecord<double>& traj, const Json& config) {
    os << "# csdnls-trajectory 1\n";
    os << "# method " << to_string(traj.method) << '\n';
    os << "# config " << config.dump() << '\n';
    os << "# columns t n re im\n";
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        const std::string t = format_double(traj.times[i]);
        const HardyStated& u = traj.states[i];
        for (Index n = 0; n <= u.trunc(); ++n)
            os << t << ' ' << n << ' ' << format_double(u[n].real()) << ' ' << format_double(u[n].imag()) << '\n';
    }
}

void write_trajectory(const std::filesystem::path& path, const TrajectoryRecord<double>& traj, const Json& config) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    write_trajectory(os, traj, config);
}

TrajectoryFile read_trajectory(std::istream& is) {
    TrajectoryFile out;
    std::string line;
    bool have_magic = false;
    std::vector<std::vector<std::complex<double>>> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream hs(line.substr(1));
            std::string key;
            hs >> key;
            std::string rest;
            std::getline(hs >> std::ws, rest);
            if (key == "csdnls-trajectory") have_magic = true;
            else if (key == "method") out.method = rest;
            else if (key == "config") out.config = Json::parse(rest);
            continue;
        }
        std::istringstream ls(line);
        std::string t, n, re, im;
        if (!(ls >> t >> n >> re >> im)) throw std::runtime_error("malformed trajectory row: " + line);
        const double tv = parse_double(t);
        const long idx = std::stol(n);
        if (out.times.empty() || idx == 0) {
            if (idx != 0) throw std::runtime_error("trajectory block must start at n = 0");
            out.times.push_back(tv);
            rows.emplace_back();
        }
        if (idx != long(rows.back().size()) || tv != out.times.back())
            throw std::runtime_error("trajectory rows out of order: " + line);
        rows.back().emplace_back(parse_double(re), parse_double(im));
    }
    if (!have_magic) throw std::runtime_error("not a trajectory file");
    for (const auto& r : rows) {
        if (r.size() != rows.front().size()) throw std::runtime_error("trajectory blocks differ in length");
        CVector<double> v(Index(r.size()));
        for (std::size_t k = 0; k < r.size(); ++k) v[Index(k)] = r[k];
        out.states.emplace_back(v);
    }
    return out;
}

TrajectoryFile read_trajectory(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot read " + path.string());
    return read_trajectory(is);
}

}  // namespace csdnls::app
