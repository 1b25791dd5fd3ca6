#pragma once

// Smallest undetermined probability over real schemes of the form
//   sigma_nu = s_nu e_0, rho_nu = r_nu e_1, tau_nu = t_nu e_1,
// reduced to a generalized symmetric eigenproblem: with a in R^n,
//   (Da)_k = a_{k-1} - a_{k+1},  (Sa)_k = a_{k-1} + a_{k+1},  k = 0..n+1,
// the minimum of (1/4)|Da|^2 / ((1/4)|Sa|^2 + |a|^2).

namespace oracle {

double optimal_error(int n);

}  // namespace oracle
