#include "dtvec/plot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

namespace dtvec {

namespace {

const cv::Scalar kPalette[] = {{180, 119, 31}, {14, 127, 255}, {44, 160, 44},
                               {40, 39, 214},  {189, 103, 148}, {75, 86, 140}};

void put_text(cv::Mat& img, const std::string& text, cv::Point at, double scale = 0.45) {
  cv::putText(img, text, at, cv::FONT_HERSHEY_SIMPLEX, scale, {0, 0, 0}, 1, cv::LINE_AA);
}

}  // namespace

void write_line_plot(const std::filesystem::path& path, const std::vector<PlotSeries>& series,
                     const PlotOptions& opt) {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  }
  if (!std::isfinite(xmin)) {
    xmin = 0;
    xmax = 1;
    ymin = 0;
    ymax = 1;
  }
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) {
    ymin -= 0.5;
    ymax += 0.5;
  }
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;

  cv::Mat img(opt.height, opt.width, CV_8UC3, cv::Scalar(255, 255, 255));
  const int left = 80, right = 20, top = 40, bottom = 60;
  const int pw = opt.width - left - right, ph = opt.height - top - bottom;
  auto to_px = [&](double x, double y) {
    return cv::Point(left + static_cast<int>(std::lround((x - xmin) / (xmax - xmin) * pw)),
                     top + static_cast<int>(std::lround((ymax - y) / (ymax - ymin) * ph)));
  };

  cv::rectangle(img, {left, top}, {left + pw, top + ph}, {0, 0, 0}, 1);
  for (int i = 0; i <= 5; ++i) {
    double y = ymin + (ymax - ymin) * i / 5.0;
    cv::Point p = to_px(xmin, y);
    cv::line(img, p, {left + pw, p.y}, {225, 225, 225}, 1);
    put_text(img, fmt::format("{:.4g}", y), {5, p.y + 4}, 0.4);
    double x = xmin + (xmax - xmin) * i / 5.0;
    cv::Point q = to_px(x, ymin);
    put_text(img, fmt::format("{:.4g}", x), {q.x - 15, top + ph + 18}, 0.4);
  }
  put_text(img, opt.title, {left, 25}, 0.6);
  put_text(img, opt.x_label, {left + pw / 2 - 40, opt.height - 15});
  put_text(img, opt.y_label, {5, top - 10});

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const cv::Scalar color = kPalette[si % std::size(kPalette)];
    std::vector<cv::Point> pts;
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (std::isfinite(s.x[i]) && std::isfinite(s.y[i])) pts.push_back(to_px(s.x[i], s.y[i]));
    }
    if (pts.size() > 1) cv::polylines(img, pts, false, color, 2, cv::LINE_AA);
    if (opt.markers || pts.size() == 1) {
      for (const auto& p : pts) cv::circle(img, p, 4, color, cv::FILLED, cv::LINE_AA);
    }
    const cv::Point legend(left + pw - 180, top + 20 + 20 * static_cast<int>(si));
    cv::line(img, legend, {legend.x + 25, legend.y}, color, 2);
    put_text(img, s.label, {legend.x + 32, legend.y + 5});
  }

  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  if (!cv::imwrite(path.string(), img)) {
    throw std::runtime_error("failed to write plot '" + path.string() + "'");
  }
}

}  // namespace dtvec
