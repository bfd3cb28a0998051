#pragma once

namespace entangle::qkd {

// Shannon binary entropy in bits, h(0) = h(1) = 0.
double binary_entropy(double p);

// Alice-Bob mutual information per sifted bit at error rate D: 1 - h(D).
double mutual_info_ab(double qber);

// Eve's information under the optimal individual attack:
// 1 - h(1/2 + sqrt(D (1 - D))).
double eve_info_optimal(double qber);

// I_AB - I_E, positive below the security threshold.
double secrecy_margin(double qber);

// (1 - 1/sqrt 2) / 2, the error rate at which the two information curves cross.
double security_threshold();

}  // namespace entangle::qkd
