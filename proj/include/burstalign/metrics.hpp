#pragma once

#include "burstalign/types.hpp"

namespace burstalign {

// PSNR after v^(1/2.2) on both images (peak 1). Identical inputs return
// +infinity.
double psnr_gamma(const RgbImage& a, const RgbImage& b);

// PSNR of two images already in the display domain.
double psnr(const RgbImage& a, const RgbImage& b);

struct SsimParams {
  int window = 11;
  double sigma = 1.5;
  double c1 = 0.01 * 0.01;
  double c2 = 0.03 * 0.03;
};

// Mean SSIM over all fully covered 11x11 gaussian windows, averaged over the
// three channels. Inputs are compared as given.
double ssim(const RgbImage& a, const RgbImage& b, const SsimParams& params = {});

// ssim() after v^(1/2.2) on both images.
double ssim_gamma(const RgbImage& a, const RgbImage& b, const SsimParams& params = {});

RgbImage gamma_image(const RgbImage& x);

}  // namespace burstalign
