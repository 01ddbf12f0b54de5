#pragma once

#include <string>
#include <vector>

namespace semcomm {

/// One table cell of an evaluation run.
struct EvalRow {
    std::string dataset;
    std::string model;
    std::string channel;
    double psnr_db = 0.0;   // capped at 99.0 when infinite (flag set)
    bool psnr_capped = false;
    double ssim = 0.0;
    double ber = 0.0;
    double bandwidth_ratio = 1.0;
};

struct CurvePoint {
    std::size_t epoch = 0;
    double loss = 0.0;
    double psnr = 0.0;
    double ssim = 0.0;
};

struct EvalReport {
    std::vector<EvalRow> rows;
    std::vector<CurvePoint> curves;
    std::vector<std::string> notes;

    std::string to_csv() const;             // one row per cell
    std::string curves_csv() const;         // epoch, loss, psnr, ssim
    std::string to_json() const;            // nested dataset -> model -> channel
    static EvalReport from_csv(const std::string& csv);
};

/// Shortest round-trippable decimal text for a double.
std::string format_double(double v);

}  // namespace semcomm
