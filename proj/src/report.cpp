#include "semcomm/report.hpp"

#include <cstdio>
#include <cstring>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace semcomm {

std::string format_double(double v) {
    char buf[64];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        double back = 0.0;
        std::sscanf(buf, "%lf", &back);
        if (back == v) break;
    }
    return buf;
}

std::string EvalReport::to_csv() const {
    std::ostringstream o;
    for (const auto& n : notes) o << "# " << n << "\n";
    o << "dataset,model,channel,psnr_db,psnr_capped,ssim,ber,bandwidth_ratio\n";
    for (const auto& r : rows)
        o << r.dataset << "," << r.model << "," << r.channel << "," << format_double(r.psnr_db)
          << "," << (r.psnr_capped ? 1 : 0) << "," << format_double(r.ssim) << ","
          << format_double(r.ber) << "," << format_double(r.bandwidth_ratio) << "\n";
    return o.str();
}

std::string EvalReport::curves_csv() const {
    std::ostringstream o;
    o << "epoch,loss,psnr,ssim\n";
    for (const auto& c : curves)
        o << c.epoch << "," << format_double(c.loss) << "," << format_double(c.psnr) << ","
          << format_double(c.ssim) << "\n";
    return o.str();
}

EvalReport EvalReport::from_csv(const std::string& csv) {
    EvalReport rep;
    std::istringstream in(csv);
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.rfind("# ", 0) == 0) {
            rep.notes.push_back(line.substr(2));
            continue;
        }
        if (!header_seen) {
            if (line.rfind("dataset,", 0) != 0)
                throw std::runtime_error("EvalReport::from_csv: missing header");
            header_seen = true;
            continue;
        }
        EvalRow r;
        std::istringstream ls(line);
        std::string field;
        auto next = [&]() {
            if (!std::getline(ls, field, ',')) throw std::runtime_error("bad CSV row: " + line);
            return field;
        };
        r.dataset = next();
        r.model = next();
        r.channel = next();
        r.psnr_db = std::stod(next());
        r.psnr_capped = next() == "1";
        r.ssim = std::stod(next());
        r.ber = std::stod(next());
        r.bandwidth_ratio = std::stod(next());
        rep.rows.push_back(std::move(r));
    }
    return rep;
}

std::string EvalReport::to_json() const {
    nlohmann::ordered_json j;
    j["notes"] = notes;
    auto& table = j["results"];
    for (const auto& r : rows) {
        auto& cell = table[r.dataset][r.model][r.channel];
        cell["psnr_db"] = r.psnr_db;
        cell["psnr_capped"] = r.psnr_capped;
        cell["ssim"] = r.ssim;
        cell["ber"] = r.ber;
        cell["bandwidth_ratio"] = r.bandwidth_ratio;
    }
    auto& curves_j = j["curves"];
    curves_j = nlohmann::ordered_json::array();
    for (const auto& c : curves)
        curves_j.push_back({{"epoch", c.epoch}, {"loss", c.loss}, {"psnr", c.psnr}, {"ssim", c.ssim}});
    return j.dump(2) + "\n";
}

}  // namespace semcomm
