#pragma once

#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <nlohmann/json.hpp>

#include "stancekde/contact_model.hpp"
#include "stancekde/eval.hpp"
#include "stancekde/synth_gait.hpp"
#include "stancekde/types.hpp"

namespace stancekde {

/// Shortest decimal form that parses back to the exact same double, so CSV
/// round trips are value-preserving.
inline std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double parse_csv_double(const std::string& s, const std::string& where) {
    double v = 0.0;
    const char* b = s.data();
    const char* e = b + s.size();
    const auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc{} || p != e)
        throw ValidationError(where + ": cannot parse number from '" + s + "'");
    return v;
}

// Trace CSV columns. Required: t, foot, ax, ay, az, wx, wy, wz. Optional:
// fx, fy, fz (N), vx, vy, vz (m/s), wvx, wvy, wvz (rad/s), label_stable,
// label_contact ({0,1}). t strictly increasing per foot.
inline constexpr std::array<const char*, 8> kRequiredTraceColumns = {
    "t", "foot", "ax", "ay", "az", "wx", "wy", "wz"};

struct LoadedTrace {
    std::vector<ImuSample> imu;
    bool has_forces = false;
    bool has_velocity = false;
    bool has_angvel = false;
    bool has_labels = false;
    std::vector<ForceSample> forces;
    std::vector<Eigen::Vector3d> vel;
    std::vector<Eigen::Vector3d> angvel;
    std::vector<GroundTruthLabel> labels;

    std::size_t size() const { return imu.size(); }
};

namespace detail {

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace detail

inline void write_trace_csv(std::ostream& os, const GaitTrace& trace) {
    os << "t,foot,ax,ay,az,wx,wy,wz,fx,fy,fz,vx,vy,vz,wvx,wvy,wvz,label_stable,label_contact\n";
    for (std::size_t i = 0; i < trace.size(); ++i) {
        const ImuSample& s = trace.imu[i];
        os << format_double(s.t) << ',' << to_string(s.foot);
        for (int j = 0; j < 3; ++j) os << ',' << format_double(s.a[j]);
        for (int j = 0; j < 3; ++j) os << ',' << format_double(s.w[j]);
        for (int j = 0; j < 3; ++j) os << ',' << format_double(trace.forces[i].F[j]);
        for (int j = 0; j < 3; ++j) os << ',' << format_double(trace.true_vel[i][j]);
        for (int j = 0; j < 3; ++j) os << ',' << format_double(trace.true_angvel[i][j]);
        os << ',' << (trace.labels[i].stable ? 1 : 0) << ','
           << (trace.labels[i].in_contact ? 1 : 0) << '\n';
    }
}

inline void write_trace_csv(const std::string& path, const GaitTrace& trace) {
    std::ofstream os(path);
    if (!os) throw ValidationError("cannot open '" + path + "' for writing");
    write_trace_csv(os, trace);
    if (!os) throw ValidationError("write failed for '" + path + "'");
}

inline LoadedTrace load_trace_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open trace file '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw ValidationError(path + ": empty file");
    const auto header = detail::split_csv(line);
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;

    for (const char* required : kRequiredTraceColumns)
        if (!col.count(required))
            throw ValidationError(path + ": missing required column '" + std::string(required) +
                                  "'");

    LoadedTrace out;
    out.has_forces = col.count("fx") && col.count("fy") && col.count("fz");
    out.has_velocity = col.count("vx") && col.count("vy") && col.count("vz");
    out.has_angvel = col.count("wvx") && col.count("wvy") && col.count("wvz");
    out.has_labels = col.count("label_stable") && col.count("label_contact");

    std::map<Foot, double> last_t;
    std::optional<FootFamily> fam;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto fields = detail::split_csv(line);
        if (fields.size() != header.size())
            throw ValidationError(path + ":" + std::to_string(lineno) + ": expected " +
                                  std::to_string(header.size()) + " fields, got " +
                                  std::to_string(fields.size()));
        const std::string where = path + ":" + std::to_string(lineno);
        const auto field = [&](const char* name) -> const std::string& {
            return fields[col.at(name)];
        };

        ImuSample s;
        s.t = parse_csv_double(field("t"), where);
        s.foot = foot_from_string(field("foot"));
        s.a = {parse_csv_double(field("ax"), where), parse_csv_double(field("ay"), where),
               parse_csv_double(field("az"), where)};
        s.w = {parse_csv_double(field("wx"), where), parse_csv_double(field("wy"), where),
               parse_csv_double(field("wz"), where)};
        try {
            s.validate();
        } catch (const ValidationError& e) {
            throw ValidationError(where + ": " + e.what());
        }

        if (!fam)
            fam = family(s.foot);
        else if (*fam != family(s.foot))
            throw ValidationError(where + ": biped and quadruped foot labels mixed in one trace");

        if (auto it = last_t.find(s.foot); it != last_t.end() && s.t <= it->second)
            throw ValidationError(where + ": timestamp not strictly increasing for foot " +
                                  std::string(to_string(s.foot)));
        last_t[s.foot] = s.t;
        out.imu.push_back(s);

        if (out.has_forces) {
            ForceSample f;
            f.t = s.t;
            f.foot = s.foot;
            f.F = {parse_csv_double(field("fx"), where), parse_csv_double(field("fy"), where),
                   parse_csv_double(field("fz"), where)};
            out.forces.push_back(f);
        }
        if (out.has_velocity)
            out.vel.push_back({parse_csv_double(field("vx"), where),
                               parse_csv_double(field("vy"), where),
                               parse_csv_double(field("vz"), where)});
        if (out.has_angvel)
            out.angvel.push_back({parse_csv_double(field("wvx"), where),
                                  parse_csv_double(field("wvy"), where),
                                  parse_csv_double(field("wvz"), where)});
        if (out.has_labels) {
            GroundTruthLabel l;
            l.t = s.t;
            l.foot = s.foot;
            l.stable = parse_csv_double(field("label_stable"), where) != 0.0;
            l.in_contact = parse_csv_double(field("label_contact"), where) != 0.0;
            out.labels.push_back(l);
        }
    }
    if (out.imu.empty()) throw ValidationError(path + ": no data rows");
    return out;
}

inline void write_estimates_csv(std::ostream& os, std::span<const ContactEstimate> estimates) {
    os << "t,foot,p_ax,p_ay,p_az,p_wx,p_wy,p_wz,p_tangential,p_rotational,p_total,warm\n";
    for (const ContactEstimate& e : estimates) {
        os << format_double(e.t) << ',' << to_string(e.foot);
        for (std::size_t k = 0; k < kAxisCount; ++k) os << ',' << format_double(e.axis_probs[k]);
        os << ',' << format_double(e.p_tangential) << ',' << format_double(e.p_rotational) << ','
           << format_double(e.p_total) << ',' << (e.warm ? 1 : 0) << '\n';
    }
}

inline void write_estimates_csv(const std::string& path,
                                std::span<const ContactEstimate> estimates) {
    std::ofstream os(path);
    if (!os) throw ValidationError("cannot open '" + path + "' for writing");
    write_estimates_csv(os, estimates);
    if (!os) throw ValidationError("write failed for '" + path + "'");
}

inline std::vector<ContactEstimate> load_estimates_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open estimates file '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw ValidationError(path + ": empty file");
    const auto header = detail::split_csv(line);
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
    for (const char* name :
         {"t", "foot", "p_ax", "p_ay", "p_az", "p_wx", "p_wy", "p_wz", "p_tangential",
          "p_rotational", "p_total", "warm"})
        if (!col.count(name))
            throw ValidationError(path + ": missing required column '" + std::string(name) + "'");

    std::vector<ContactEstimate> out;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto fields = detail::split_csv(line);
        const std::string where = path + ":" + std::to_string(lineno);
        if (fields.size() != header.size())
            throw ValidationError(where + ": wrong field count");
        ContactEstimate e;
        e.t = parse_csv_double(fields[col.at("t")], where);
        e.foot = foot_from_string(fields[col.at("foot")]);
        const std::array<const char*, 6> pk = {"p_ax", "p_ay", "p_az", "p_wx", "p_wy", "p_wz"};
        for (std::size_t k = 0; k < kAxisCount; ++k)
            e.axis_probs[k] = parse_csv_double(fields[col.at(pk[k])], where);
        e.p_tangential = parse_csv_double(fields[col.at("p_tangential")], where);
        e.p_rotational = parse_csv_double(fields[col.at("p_rotational")], where);
        e.p_total = parse_csv_double(fields[col.at("p_total")], where);
        e.warm = parse_csv_double(fields[col.at("warm")], where) != 0.0;
        out.push_back(e);
    }
    return out;
}

inline nlohmann::json meta_to_json(const TraceMeta& meta) {
    nlohmann::json j;
    j["name"] = meta.name;
    j["seed"] = meta.seed;
    j["prng"] = meta.prng;
    j["sample_rate_hz"] = meta.sample_rate_hz;
    j["sigma"] = meta.sigma;
    j["force_scale"] = meta.force_scale;
    j["vel_eps"] = meta.vel_eps;
    j["fz_eps"] = meta.fz_eps;
    j["precompensated"] = meta.precompensated;
    j["label_convention"] =
        "stable requires contact (fz > fz_eps) and sole speed within vel_eps; swing is unstable";
    nlohmann::json phases = nlohmann::json::array();
    for (const PhaseSpan& p : meta.phases) {
        phases.push_back({{"kind", p.kind},
                          {"t_begin", p.t_begin},
                          {"t_end", p.t_end},
                          {"mu_s", p.mu_s},
                          {"first_sample", p.first_sample},
                          {"n_samples", p.n_samples}});
    }
    j["phases"] = phases;
    if (!meta.precompensated) {
        j["embedded"] = {{"b_a", {meta.embedded_b_a.x(), meta.embedded_b_a.y(),
                                  meta.embedded_b_a.z()}},
                         {"b_w", {meta.embedded_b_w.x(), meta.embedded_b_w.y(),
                                  meta.embedded_b_w.z()}},
                         {"g", {meta.embedded_g.x(), meta.embedded_g.y(), meta.embedded_g.z()}}};
    }
    return j;
}

inline TraceMeta meta_from_json(const nlohmann::json& j) {
    TraceMeta m;
    m.name = j.value("name", "unknown");
    m.seed = j.value("seed", std::uint64_t{0});
    m.prng = j.value("prng", "");
    m.sample_rate_hz = j.value("sample_rate_hz", 1000.0);
    if (j.contains("sigma")) m.sigma = j["sigma"].get<Axes6>();
    m.force_scale = j.value("force_scale", 1.0);
    m.vel_eps = j.value("vel_eps", 1e-3);
    m.fz_eps = j.value("fz_eps", 1.0);
    m.precompensated = j.value("precompensated", true);
    if (j.contains("phases"))
        for (const auto& jp : j["phases"]) {
            PhaseSpan p;
            p.kind = jp.value("kind", "?");
            p.t_begin = jp.value("t_begin", 0.0);
            p.t_end = jp.value("t_end", 0.0);
            p.mu_s = jp.value("mu_s", 0.0);
            p.first_sample = jp.value("first_sample", std::size_t{0});
            p.n_samples = jp.value("n_samples", std::size_t{0});
            m.phases.push_back(p);
        }
    return m;
}

inline std::string meta_path_for(const std::string& trace_path) {
    const auto dot = trace_path.rfind(".csv");
    if (dot != std::string::npos && dot == trace_path.size() - 4)
        return trace_path.substr(0, dot) + ".meta.json";
    return trace_path + ".meta.json";
}

inline void write_meta_json(const std::string& path, const TraceMeta& meta) {
    std::ofstream os(path);
    if (!os) throw ValidationError("cannot open '" + path + "' for writing");
    os << meta_to_json(meta).dump(2) << '\n';
}

inline std::optional<TraceMeta> try_load_meta_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) return std::nullopt;
    nlohmann::json j;
    in >> j;
    return meta_from_json(j);
}

inline nlohmann::json report_to_json(const EvalReport& r) {
    nlohmann::json j;
    j["n"] = r.n;
    j["rmse"] = r.rmse;
    j["threshold"] = r.threshold;
    j["histogram"] = r.histogram;
    j["confusion"] = {{"tp", r.confusion.tp},
                      {"fp", r.confusion.fp},
                      {"tn", r.confusion.tn},
                      {"fn", r.confusion.fn}};
    if (r.throughput_hz) j["throughput_hz"] = *r.throughput_hz;
    return j;
}

inline void write_histogram_csv(const std::string& path, std::size_t bins,
                                std::span<const std::size_t> method,
                                std::span<const std::size_t> baseline) {
    std::ofstream os(path);
    if (!os) throw ValidationError("cannot open '" + path + "' for writing");
    os << "bin_low,bin_high,method_count,baseline_count\n";
    for (std::size_t b = 0; b < bins; ++b) {
        const double lo = static_cast<double>(b) / static_cast<double>(bins);
        const double hi = static_cast<double>(b + 1) / static_cast<double>(bins);
        os << format_double(lo) << ',' << format_double(hi) << ','
           << (b < method.size() ? method[b] : 0) << ','
           << (b < baseline.size() ? baseline[b] : 0) << '\n';
    }
}

}  // namespace stancekde
