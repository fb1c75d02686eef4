//! Verner's efficient 6(5) pair, nine stages with FSAL, plus one extra
//! stage for a continuous fifth-order interpolant.

use crate::scalar::Real;

pub const STAGES: usize = 9;
pub const DENSE_STAGES: usize = 10;
pub const DENSE_DEGREE: usize = 6;

const C: [f64; STAGES] = [0.0, 0.6e-1, 9.593_333_333_333_333e-2, 0.1439, 0.4973, 0.9725, 0.9995, 1.0, 1.0];

#[rustfmt::skip]
const A: [[f64; STAGES]; STAGES] = [
    [0.0; STAGES],
    [0.6e-1, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.923_996_296_296_296_2e-2, 7.669_337_037_037_037e-2, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.35975e-1, 0.0, 0.107925, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.318_683_415_233_148_4, 0.0, -5.042_058_063_628_562, 4.220_674_648_395_414, 0.0, 0.0, 0.0, 0.0, 0.0],
    [-41.872_591_664_327_516, 0.0, 159.432_562_163_137_5, -122.119_213_565_010_03, 5.531_743_066_200_054, 0.0, 0.0, 0.0, 0.0],
    [-54.430_156_935_316_504, 0.0, 207.067_251_365_018_48, -158.610_813_784_59, 6.991_816_585_950_242, -1.859_723_106_220_323_4e-2, 0.0, 0.0, 0.0],
    [-54.663_741_787_281_98, 0.0, 207.952_806_255_389_36, -159.288_957_474_499_5, 7.018_743_740_796_944, -1.833_878_590_504_572_2e-2, -5.119_484_997_882_099e-4, 0.0, 0.0],
    [3.438_957_868_357_036e-2, 0.0, 0.0, 0.258_262_455_563_350_3, 0.420_937_118_967_353_7, 4.405_396_469_669_31, -176.483_119_024_298_65, 172.364_133_401_415_07, 0.0],
];

#[rustfmt::skip]
const B_HIGH: [f64; STAGES] = [3.438_957_868_357_036e-2, 0.0, 0.0, 0.258_262_455_563_350_3, 0.420_937_118_967_353_7, 4.405_396_469_669_31, -176.483_119_024_298_65, 172.364_133_401_415_07, 0.0];
#[rustfmt::skip]
const B_LOW: [f64; STAGES] = [4.909_967_648_382_49e-2, 0.0, 0.0, 0.225_111_222_951_652_42, 0.469_468_225_302_956_2, 0.806_579_224_998_886_8, 0.0, -0.607_119_489_177_796, 5.686_113_944_047_569_6e-2];

const C_DENSE: f64 = 0.5;
#[rustfmt::skip]
const A_DENSE: [f64; DENSE_STAGES] = [1.652_415_901_357_280_6e-2, 0.0, 0.0, 0.305_312_818_751_417_9, 0.207_120_093_820_197_9, -1.293_879_140_655_123, 57.119_884_115_881_49, -55.879_792_075_109_32, 2.483_002_829_776_601_4e-2, 0.0];

// b_i(θ) = sum_j B_DENSE[i][j] θ^{j+1}
#[rustfmt::skip]
const B_DENSE: [[f64; DENSE_DEGREE]; DENSE_STAGES] = [
    [1.0, -5.308_169_607_103_577, 10.181_680_448_958_68, -7.520_036_991_611_715, 0.934_048_536_863_116_1, 0.746_867_191_577_065],
    [0.0; DENSE_DEGREE],
    [0.0; DENSE_DEGREE],
    [0.0, 6.272_050_253_212_501, -16.026_181_474_677_46, 12.844_356_324_519_618, -1.148_794_504_476_759_1, -1.683_168_143_014_549_8],
    [0.0, 6.876_491_702_846_304, -24.635_767_260_846_333, 33.210_786_483_797_17, -17.494_615_282_636_44, 2.464_041_475_806_649_6],
    [0.0, -35.544_451_710_599_6, 165.701_617_019_024_2, -385.463_539_549_114_3, 442.432_413_701_570_17, -182.720_642_991_211_2],
    [0.0, 1_918.654_856_698_011_4, -9_268.121_508_966_042, 20_858.337_028_772_55, -22_645.827_671_584_81, 8_960.474_176_055_992],
    [0.0, -1_883.069_802_132_718_2, 9_101.025_187_200_634, -20_473.188_551_959_534, 22_209.765_551_256_532, -8_782.168_250_963_5],
    [0.0, 0.119_024_796_351_236_43, -0.125_026_967_050_393_76, 1.779_956_919_394_999_1, -4.660_932_123_043_763, 2.886_977_374_347_921],
    [0.0, -8.0, 32.0, -40.0, 16.0, 0.0],
];

/// Coefficients converted to the working scalar type.
#[derive(Debug, Clone)]
pub struct Tableau<T> {
    pub c: [T; STAGES],
    pub a: [[T; STAGES]; STAGES],
    pub b_high: [T; STAGES],
    pub b_err: [T; STAGES],
    pub c_dense: T,
    pub a_dense: [T; DENSE_STAGES],
    pub b_dense: [[T; DENSE_DEGREE]; DENSE_STAGES],
}

/// Order of the propagated solution.
pub const ORDER: usize = 6;

impl<T: Real> Tableau<T> {
    pub fn verner65() -> Self {
        Self {
            c: C.map(T::lit),
            a: A.map(|row| row.map(T::lit)),
            b_high: B_HIGH.map(T::lit),
            b_err: std::array::from_fn(|i| T::lit(B_HIGH[i] - B_LOW[i])),
            c_dense: T::lit(C_DENSE),
            a_dense: A_DENSE.map(T::lit),
            b_dense: B_DENSE.map(|row| row.map(T::lit)),
        }
    }

    /// Interpolation weights `b_i(θ)` for all dense stages.
    pub fn dense_weights(&self, theta: T) -> [T; DENSE_STAGES] {
        std::array::from_fn(|i| {
            let row = &self.b_dense[i];
            let mut acc = row[DENSE_DEGREE - 1];
            for j in (0..DENSE_DEGREE - 1).rev() {
                acc = acc * theta + row[j];
            }
            acc * theta
        })
    }
}
