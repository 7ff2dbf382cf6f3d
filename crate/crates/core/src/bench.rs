//! The classical 23-function benchmark suite (f1 to f23).
//!
//! f1 to f13 are scalable and accept any dimension >= 1; f14 to f23 are
//! defined only at their canonical dimension. Evaluation rejects points
//! outside the box and never clamps.

use std::f64::consts::{E, PI};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::SimRng;

/// How many coordinates a function accepts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "dim")]
pub enum DimensionMode {
    Scalable,
    Fixed(usize),
}

/// Descriptor of one benchmark function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchmarkFunction {
    pub id: u8,
    pub name: &'static str,
    pub dimension_mode: DimensionMode,
    pub lower: f64,
    pub upper: f64,
    /// true only for f7, whose value carries a `random[0,1)` summand
    pub stochastic: bool,
}

/// JSON row for the CLI `list` command.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CatalogEntry {
    pub id: u8,
    pub name: String,
    pub bounds: (f64, f64),
    pub dimension_mode: DimensionMode,
    /// Optimum at the canonical dimension (30 for scalable functions).
    pub known_optimum: Option<f64>,
}

const CATALOG: [BenchmarkFunction; 23] = [
    scalable(1, "sphere", -100.0, 100.0),
    scalable(2, "schwefel_2_22", -100.0, 100.0),
    scalable(3, "schwefel_1_2", -100.0, 100.0),
    scalable(4, "schwefel_2_21", -100.0, 100.0),
    scalable(5, "rosenbrock", -30.0, 30.0),
    scalable(6, "step", -100.0, 100.0),
    BenchmarkFunction {
        id: 7,
        name: "quartic_noise",
        dimension_mode: DimensionMode::Scalable,
        lower: -1.28,
        upper: 1.28,
        stochastic: true,
    },
    scalable(8, "schwefel_2_26", -500.0, 500.0),
    scalable(9, "rastrigin", -5.12, 5.12),
    scalable(10, "ackley", -32.0, 32.0),
    scalable(11, "griewank", -600.0, 600.0),
    scalable(12, "penalized_1", -50.0, 50.0),
    scalable(13, "penalized_2", -50.0, 50.0),
    fixed(14, "shekel_foxholes", 2, -65.536, 65.536),
    fixed(15, "kowalik", 4, -5.0, 5.0),
    fixed(16, "six_hump_camel", 2, -5.0, 5.0),
    fixed(17, "branin", 2, -5.0, 5.0),
    fixed(18, "goldstein_price", 2, -2.0, 2.0),
    fixed(19, "hartmann_3", 3, 0.0, 1.0),
    fixed(20, "hartmann_6", 6, 0.0, 1.0),
    fixed(21, "shekel_5", 4, 0.0, 10.0),
    fixed(22, "shekel_7", 4, 0.0, 10.0),
    fixed(23, "shekel_10", 4, 0.0, 10.0),
];

const fn scalable(id: u8, name: &'static str, lower: f64, upper: f64) -> BenchmarkFunction {
    BenchmarkFunction {
        id,
        name,
        dimension_mode: DimensionMode::Scalable,
        lower,
        upper,
        stochastic: false,
    }
}

const fn fixed(id: u8, name: &'static str, dim: usize, lower: f64, upper: f64) -> BenchmarkFunction {
    BenchmarkFunction {
        id,
        name,
        dimension_mode: DimensionMode::Fixed(dim),
        lower,
        upper,
        stochastic: false,
    }
}

/// All 23 functions, ordered by id.
pub fn catalog() -> &'static [BenchmarkFunction] {
    &CATALOG
}

/// Look up a function by its id (1..=23).
pub fn by_id(id: u8) -> Result<&'static BenchmarkFunction> {
    CATALOG
        .iter()
        .find(|f| f.id == id)
        .ok_or(Error::UnknownFunction(id))
}

pub fn catalog_entries() -> Vec<CatalogEntry> {
    CATALOG
        .iter()
        .map(|f| CatalogEntry {
            id: f.id,
            name: f.name.to_string(),
            bounds: f.bounds(),
            dimension_mode: f.dimension_mode,
            known_optimum: f.known_optimum(f.canonical_dimension()),
        })
        .collect()
}

impl BenchmarkFunction {
    pub fn bounds(&self) -> (f64, f64) {
        (self.lower, self.upper)
    }

    pub fn is_scalable(&self) -> bool {
        matches!(self.dimension_mode, DimensionMode::Scalable)
    }

    /// 30 for scalable functions, the fixed dimension otherwise.
    pub fn canonical_dimension(&self) -> usize {
        match self.dimension_mode {
            DimensionMode::Scalable => 30,
            DimensionMode::Fixed(d) => d,
        }
    }

    pub fn check_dimension(&self, dim: usize) -> Result<()> {
        let ok = match self.dimension_mode {
            DimensionMode::Scalable => dim >= 1,
            DimensionMode::Fixed(d) => dim == d,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidDimension {
                function: self.id,
                got: dim,
                expected: match self.dimension_mode {
                    DimensionMode::Scalable => "any dimension >= 1".to_string(),
                    DimensionMode::Fixed(d) => format!("exactly {d}"),
                },
            })
        }
    }

    /// Known global minimum value at `dim`, when one is established.
    ///
    /// f7 has none (its noise floor is random); f8 scales with the dimension.
    pub fn known_optimum(&self, dim: usize) -> Option<f64> {
        match self.id {
            1..=6 | 9..=13 => Some(0.0),
            7 => None,
            8 => Some(SCHWEFEL_226_PER_DIM * dim as f64),
            14 => Some(0.998_003_837_794_45),
            15 => Some(3.074_859_878_056_051e-4),
            16 => Some(-1.031_628_453_489_877_6),
            17 => Some(0.397_887_357_729_738_16),
            18 => Some(3.0),
            19 => Some(-3.862_782_147_820_755_4),
            20 => Some(-3.322_368_011_415_515),
            21 => Some(-10.153_199_679_058_229),
            22 => Some(-10.402_940_566_818_662),
            23 => Some(-10.536_409_816_692_046),
            _ => None,
        }
    }

    /// A point inside the box that attains `known_optimum(dim)`.
    pub fn optimum_witness(&self, dim: usize) -> Option<Vec<f64>> {
        let point = match self.id {
            1..=4 | 6 | 9..=11 => vec![0.0; dim],
            5 | 13 => vec![1.0; dim],
            12 => vec![-1.0; dim],
            8 => vec![SCHWEFEL_226_ARGMIN; dim],
            14 => vec![-31.978_334_957_621_07, -31.978_328_496_668_112],
            15 => vec![
                0.192_833_453_042_748_13,
                0.190_836_240_275_970_35,
                0.123_117_299_075_980_03,
                0.135_765_990_339_844_66,
            ],
            16 => vec![0.089_842_016_529_270_98, -0.712_656_401_380_720_2],
            17 => vec![PI, 2.275],
            18 => vec![0.0, -1.0],
            19 => vec![0.114_614_327_869_381_44, 0.555_648_849_854_593_4, 0.852_546_952_926_669_5],
            20 => vec![
                0.201_689_512_892_290_5,
                0.150_010_693_237_428_97,
                0.476_873_976_761_176_8,
                0.275_332_430_783_950_8,
                0.311_651_618_487_395_87,
                0.657_300_534_998_914_2,
            ],
            21 => vec![
                4.000_037_152_376_549,
                4.000_133_278_657_566,
                4.000_037_151_057_555,
                4.000_133_277_090_425,
            ],
            22 => vec![
                4.000_572_914_277_084,
                4.000_689_366_040_889,
                3.999_489_710_793_844_7,
                3.999_606_160_006_792_3,
            ],
            23 => vec![
                4.000_746_533_201_553,
                4.000_592_934_538_832,
                3.999_663_397_220_255_8,
                3.999_509_801_285_225_5,
            ],
            _ => return None,
        };
        Some(point)
    }

    /// Evaluate at `x`. The rng is touched only by the stochastic f7.
    pub fn evaluate(&self, x: &[f64], rng: &mut SimRng) -> Result<f64> {
        self.check_dimension(x.len())?;
        if let Some((index, &value)) = x
            .iter()
            .enumerate()
            .find(|(_, v)| !(self.lower..=self.upper).contains(*v))
        {
            return Err(Error::OutOfBounds {
                function: self.id,
                index,
                value,
            });
        }
        Ok(self.evaluate_unchecked(x, rng))
    }

    /// Evaluate without dimension or bound checks. Callers guarantee both.
    pub fn evaluate_unchecked(&self, x: &[f64], rng: &mut SimRng) -> f64 {
        match self.id {
            1 => sphere(x),
            2 => schwefel_222(x),
            3 => schwefel_12(x),
            4 => schwefel_221(x),
            5 => rosenbrock(x),
            6 => step(x),
            7 => quartic(x) + rng.random::<f64>(),
            8 => schwefel_226(x),
            9 => rastrigin(x),
            10 => ackley(x),
            11 => griewank(x),
            12 => penalized_1(x),
            13 => penalized_2(x),
            14 => foxholes(x),
            15 => kowalik(x),
            16 => six_hump_camel(x),
            17 => branin(x),
            18 => goldstein_price(x),
            19 => hartmann(x, &HARTMANN3_A, &HARTMANN3_P),
            20 => hartmann(x, &HARTMANN6_A, &HARTMANN6_P),
            21 => shekel(x, 5),
            22 => shekel(x, 7),
            23 => shekel(x, 10),
            _ => unreachable!("catalog ids are 1..=23"),
        }
    }
}

const SCHWEFEL_226_ARGMIN: f64 = 420.968_746_359_982;
const SCHWEFEL_226_PER_DIM: f64 = -418.982_887_272_433_8;

pub fn sphere(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

pub fn schwefel_222(x: &[f64]) -> f64 {
    let sum: f64 = x.iter().map(|v| v.abs()).sum();
    let prod: f64 = x.iter().map(|v| v.abs()).product();
    sum + prod
}

pub fn schwefel_12(x: &[f64]) -> f64 {
    let mut prefix = 0.0;
    let mut total = 0.0;
    for v in x {
        prefix += v;
        total += prefix * prefix;
    }
    total
}

pub fn schwefel_221(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

pub fn rosenbrock(x: &[f64]) -> f64 {
    x.windows(2)
        .map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (w[0] - 1.0).powi(2))
        .sum()
}

pub fn step(x: &[f64]) -> f64 {
    x.iter().map(|v| (v + 0.5).floor().powi(2)).sum()
}

/// Deterministic part of f7.
pub fn quartic(x: &[f64]) -> f64 {
    x.iter()
        .enumerate()
        .map(|(i, v)| (i + 1) as f64 * v.powi(4))
        .sum()
}

pub fn schwefel_226(x: &[f64]) -> f64 {
    x.iter().map(|v| -v * v.abs().sqrt().sin()).sum()
}

pub fn rastrigin(x: &[f64]) -> f64 {
    x.iter()
        .map(|v| v * v - 10.0 * (2.0 * PI * v).cos() + 10.0)
        .sum()
}

pub fn ackley(x: &[f64]) -> f64 {
    let d = x.len() as f64;
    let sq: f64 = x.iter().map(|v| v * v).sum::<f64>() / d;
    let cs: f64 = x.iter().map(|v| (2.0 * PI * v).cos()).sum::<f64>() / d;
    -20.0 * (-0.2 * sq.sqrt()).exp() - cs.exp() + 20.0 + E
}

pub fn griewank(x: &[f64]) -> f64 {
    let sum: f64 = x.iter().map(|v| v * v).sum::<f64>() / 4000.0;
    let prod: f64 = x
        .iter()
        .enumerate()
        .map(|(i, v)| (v / ((i + 1) as f64).sqrt()).cos())
        .product();
    sum - prod + 1.0
}

/// Penalty term used by f12 and f13.
pub fn penalty_u(y: f64, a: f64, k: f64, m: i32) -> f64 {
    if y > a {
        k * (y - a).powi(m)
    } else if y < -a {
        k * (-y - a).powi(m)
    } else {
        0.0
    }
}

pub fn penalized_1(x: &[f64]) -> f64 {
    let d = x.len();
    let v: Vec<f64> = x.iter().map(|y| 1.0 + (y + 1.0) / 4.0).collect();
    let mut inner = 10.0 * (PI * v[0]).sin().powi(2);
    for i in 0..d - 1 {
        inner += (v[i] - 1.0).powi(2) * (1.0 + 10.0 * (PI * v[i + 1]).sin().powi(2));
    }
    inner += (v[d - 1] - 1.0).powi(2);
    let penalty: f64 = x.iter().map(|&y| penalty_u(y, 10.0, 100.0, 4)).sum();
    PI / d as f64 * inner + penalty
}

pub fn penalized_2(x: &[f64]) -> f64 {
    let d = x.len();
    let mut inner = (3.0 * PI * x[0]).sin().powi(2);
    for i in 0..d - 1 {
        inner += (x[i] - 1.0).powi(2) * (1.0 + (3.0 * PI * x[i + 1]).sin().powi(2));
    }
    inner += (x[d - 1] - 1.0).powi(2) * (1.0 + (2.0 * PI * x[d - 1]).sin().powi(2));
    let penalty: f64 = x.iter().map(|&y| penalty_u(y, 5.0, 100.0, 4)).sum();
    0.1 * inner + penalty
}

/// Constant arrays backing the fixed-dimension functions.
#[derive(Debug, Clone, Copy)]
pub struct CoefficientTable {
    pub function_id: u8,
    pub matrix_a: &'static [&'static [f64]],
    pub vector_b: &'static [f64],
    pub vector_c: &'static [f64],
    pub matrix_p: &'static [&'static [f64]],
}

const FOXHOLE_ROW: [f64; 25] = {
    let base = [-32.0, -16.0, 0.0, 16.0, 32.0];
    let mut row = [0.0; 25];
    let mut j = 0;
    while j < 25 {
        row[j] = base[j % 5];
        j += 1;
    }
    row
};
const FOXHOLE_COL: [f64; 25] = {
    let base = [-32.0, -16.0, 0.0, 16.0, 32.0];
    let mut row = [0.0; 25];
    let mut j = 0;
    while j < 25 {
        row[j] = base[j / 5];
        j += 1;
    }
    row
};
const FOXHOLE_A: [&[f64]; 2] = [&FOXHOLE_ROW, &FOXHOLE_COL];

const KOWALIK_A: [f64; 11] = [
    0.1957, 0.1947, 0.1735, 0.1600, 0.0844, 0.0627, 0.0456, 0.0342, 0.0323, 0.0235, 0.0246,
];
// b_i = 1 / [0.25, 0.5, 1, 2, 4, 6, 8, 10, 12, 14, 16]
const KOWALIK_B: [f64; 11] = [
    4.0,
    2.0,
    1.0,
    0.5,
    0.25,
    1.0 / 6.0,
    0.125,
    0.1,
    1.0 / 12.0,
    1.0 / 14.0,
    0.0625,
];

const HARTMANN_C: [f64; 4] = [1.0, 1.2, 3.0, 3.2];
const HARTMANN3_A: [&[f64]; 4] = [
    &[3.0, 10.0, 30.0],
    &[0.1, 10.0, 35.0],
    &[3.0, 10.0, 30.0],
    &[0.1, 10.0, 35.0],
];
const HARTMANN3_P: [&[f64]; 4] = [
    &[0.3689, 0.1170, 0.2673],
    &[0.4699, 0.4387, 0.7470],
    &[0.1091, 0.8732, 0.5547],
    &[0.03815, 0.5743, 0.8828],
];
const HARTMANN6_A: [&[f64]; 4] = [
    &[10.0, 3.0, 17.0, 3.5, 1.7, 8.0],
    &[0.05, 10.0, 17.0, 0.1, 8.0, 14.0],
    &[3.0, 3.5, 1.7, 10.0, 17.0, 8.0],
    &[17.0, 8.0, 0.05, 10.0, 0.1, 14.0],
];
const HARTMANN6_P: [&[f64]; 4] = [
    &[0.1312, 0.1696, 0.5569, 0.0124, 0.8283, 0.5886],
    &[0.2329, 0.4135, 0.8307, 0.3736, 0.1004, 0.9991],
    &[0.2348, 0.1451, 0.3522, 0.2883, 0.3047, 0.6650],
    &[0.4047, 0.8828, 0.8732, 0.5743, 0.1091, 0.0381],
];

const SHEKEL_A: [&[f64]; 10] = [
    &[4.0, 4.0, 4.0, 4.0],
    &[1.0, 1.0, 1.0, 1.0],
    &[8.0, 8.0, 8.0, 8.0],
    &[6.0, 6.0, 6.0, 6.0],
    &[3.0, 7.0, 3.0, 7.0],
    &[2.0, 9.0, 2.0, 9.0],
    &[5.0, 5.0, 3.0, 3.0],
    &[8.0, 1.0, 8.0, 1.0],
    &[6.0, 2.0, 6.0, 2.0],
    &[7.0, 3.6, 7.0, 3.6],
];
const SHEKEL_C: [f64; 10] = [0.1, 0.2, 0.2, 0.4, 0.4, 0.6, 0.3, 0.7, 0.5, 0.5];

/// Coefficient table for f14, f15, f19 to f23; `None` for the others.
pub fn coefficients(function_id: u8) -> Option<CoefficientTable> {
    let empty: &'static [&'static [f64]] = &[];
    let table = match function_id {
        14 => CoefficientTable {
            function_id,
            matrix_a: &FOXHOLE_A,
            vector_b: &[],
            vector_c: &[],
            matrix_p: empty,
        },
        15 => CoefficientTable {
            function_id,
            matrix_a: empty,
            vector_b: &KOWALIK_B,
            vector_c: &KOWALIK_A,
            matrix_p: empty,
        },
        19 => CoefficientTable {
            function_id,
            matrix_a: &HARTMANN3_A,
            vector_b: &[],
            vector_c: &HARTMANN_C,
            matrix_p: &HARTMANN3_P,
        },
        20 => CoefficientTable {
            function_id,
            matrix_a: &HARTMANN6_A,
            vector_b: &[],
            vector_c: &HARTMANN_C,
            matrix_p: &HARTMANN6_P,
        },
        21 | 22 | 23 => {
            let rows = match function_id {
                21 => 5,
                22 => 7,
                _ => 10,
            };
            CoefficientTable {
                function_id,
                matrix_a: &SHEKEL_A[..rows],
                vector_b: &[],
                vector_c: &SHEKEL_C[..rows],
                matrix_p: empty,
            }
        }
        _ => return None,
    };
    Some(table)
}

pub fn foxholes(x: &[f64]) -> f64 {
    let inner: f64 = (0..25)
        .map(|j| {
            let s: f64 = (0..2).map(|i| (x[i] - FOXHOLE_A[i][j]).powi(6)).sum();
            1.0 / ((j + 1) as f64 + s)
        })
        .sum();
    1.0 / (1.0 / 500.0 + inner)
}

pub fn kowalik(x: &[f64]) -> f64 {
    KOWALIK_A
        .iter()
        .zip(KOWALIK_B.iter())
        .map(|(&a, &b)| {
            let r = a - x[0] * (b * b + b * x[1]) / (b * b + b * x[2] + x[3]);
            r * r
        })
        .sum()
}

pub fn six_hump_camel(x: &[f64]) -> f64 {
    let (a, b) = (x[0], x[1]);
    4.0 * a * a - 2.1 * a.powi(4) + a.powi(6) / 3.0 + a * b - 4.0 * b * b + 4.0 * b.powi(4)
}

pub fn branin(x: &[f64]) -> f64 {
    let (a, b) = (x[0], x[1]);
    (b - 5.1 / (4.0 * PI * PI) * a * a + 5.0 / PI * a - 6.0).powi(2)
        + 10.0 * (1.0 - 1.0 / (8.0 * PI)) * a.cos()
        + 10.0
}

pub fn goldstein_price(x: &[f64]) -> f64 {
    let (a, b) = (x[0], x[1]);
    let left = 1.0
        + (a + b + 1.0).powi(2)
            * (19.0 - 14.0 * a + 3.0 * a * a - 14.0 * b + 6.0 * a * b + 3.0 * b * b);
    let right = 30.0
        + (2.0 * a - 3.0 * b).powi(2)
            * (18.0 - 32.0 * a + 12.0 * a * a + 48.0 * b - 36.0 * a * b + 27.0 * b * b);
    left * right
}

fn hartmann(x: &[f64], a: &[&[f64]], p: &[&[f64]]) -> f64 {
    -(0..4)
        .map(|i| {
            let s: f64 = x
                .iter()
                .enumerate()
                .map(|(j, v)| a[i][j] * (v - p[i][j]).powi(2))
                .sum();
            HARTMANN_C[i] * (-s).exp()
        })
        .sum::<f64>()
}

fn shekel(x: &[f64], rows: usize) -> f64 {
    -(0..rows)
        .map(|i| {
            let d: f64 = x
                .iter()
                .zip(SHEKEL_A[i].iter())
                .map(|(v, a)| (v - a).powi(2))
                .sum();
            1.0 / (d + SHEKEL_C[i])
        })
        .sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn rng() -> SimRng {
        SimRng::seed_from_u64(1)
    }

    #[test]
    fn origin_values() {
        let mut r = rng();
        let f = |id: u8, x: &[f64], r: &mut SimRng| by_id(id).unwrap().evaluate(x, r).unwrap();
        assert_eq!(f(1, &[0.0; 30], &mut r), 0.0);
        assert_eq!(f(5, &[1.0; 30], &mut r), 0.0);
        assert_eq!(f(9, &[0.0; 50], &mut r), 0.0);
        assert!(f(10, &[0.0; 30], &mut r).abs() <= 1e-15);
        for id in [1, 2, 3, 4, 6, 9, 10, 11] {
            assert!(f(id, &[0.0; 30], &mut r).abs() <= 1e-12, "f{id}");
        }
        assert_eq!(f(6, &[0.0; 30], &mut r), 0.0);
    }

    #[test]
    fn camel_reference_point() {
        let v = by_id(16)
            .unwrap()
            .evaluate(&[0.08984, -0.7127], &mut rng())
            .unwrap();
        assert!((v - -1.0316).abs() <= 1e-3, "{v}");
    }

    #[test]
    fn bounds_table() {
        assert_eq!(by_id(1).unwrap().bounds(), (-100.0, 100.0));
        assert_eq!(by_id(5).unwrap().bounds(), (-30.0, 30.0));
        assert_eq!(by_id(7).unwrap().bounds(), (-1.28, 1.28));
        assert_eq!(by_id(12).unwrap().bounds(), (-50.0, 50.0));
        assert!(catalog().iter().all(|f| f.lower < f.upper));
    }

    #[test]
    fn catalog_shape() {
        assert_eq!(catalog().len(), 23);
        assert_eq!(catalog()[0].id, 1);
        for (i, f) in catalog().iter().enumerate() {
            assert_eq!(f.id as usize, i + 1);
            if f.is_scalable() {
                for d in [30, 50, 100] {
                    assert!(f.check_dimension(d).is_ok());
                }
            }
        }
        assert_eq!(catalog().iter().filter(|f| f.stochastic).count(), 1);
        assert!(by_id(7).unwrap().stochastic);
    }

    #[test]
    fn rejects_bad_input() {
        let mut r = rng();
        let f16 = by_id(16).unwrap();
        assert!(matches!(
            f16.evaluate(&[0.0; 3], &mut r),
            Err(Error::InvalidDimension { .. })
        ));
        assert!(matches!(
            by_id(1).unwrap().evaluate(&[0.0, 100.5], &mut r),
            Err(Error::OutOfBounds { index: 1, .. })
        ));
        assert!(by_id(1).unwrap().evaluate(&[], &mut r).is_err());
        assert!(matches!(by_id(24), Err(Error::UnknownFunction(24))));
    }

    #[test]
    fn optimum_witnesses_attain_known_optima() {
        let mut r = rng();
        for f in catalog().iter().filter(|f| !f.stochastic) {
            let dim = f.canonical_dimension();
            let x = f.optimum_witness(dim).unwrap();
            let want = f.known_optimum(dim).unwrap();
            let got = f.evaluate(&x, &mut r).unwrap();
            assert!((got - want).abs() <= 1e-9, "f{}: {got} vs {want}", f.id);
        }
    }

    #[test]
    fn witness_values_match_literature() {
        // commonly quoted optima, 4 to 5 significant digits
        let lit = [
            (14, 0.998),
            (15, 0.0003075),
            (16, -1.0316),
            (17, 0.3979),
            (18, 3.0),
            (19, -3.8628),
            (20, -3.3224),
            (21, -10.1532),
            (22, -10.4029),
            (23, -10.5364),
        ];
        for (id, v) in lit {
            let f = by_id(id).unwrap();
            let got = f.known_optimum(f.canonical_dimension()).unwrap();
            assert!((got - v).abs() <= 1e-4 * v.abs().max(1.0), "f{id}");
        }
        let f8 = by_id(8).unwrap();
        let x = f8.optimum_witness(30).unwrap();
        assert!((schwefel_226(&x) - -12569.487).abs() < 1e-2);
    }

    #[test]
    fn coefficient_shapes() {
        assert_eq!(coefficients(21).unwrap().matrix_a.len(), 5);
        assert_eq!(coefficients(22).unwrap().matrix_a.len(), 7);
        assert_eq!(coefficients(23).unwrap().matrix_a.len(), 10);
        assert_eq!(coefficients(23).unwrap().vector_c.len(), 10);
        let fox = coefficients(14).unwrap();
        assert_eq!(fox.matrix_a.len(), 2);
        assert!(fox.matrix_a.iter().all(|r| r.len() == 25));
        assert_eq!(coefficients(15).unwrap().vector_b.len(), 11);
        assert_eq!(coefficients(19).unwrap().matrix_p[0].len(), 3);
        assert_eq!(coefficients(20).unwrap().matrix_p[3].len(), 6);
        assert!(coefficients(1).is_none());
    }

    #[test]
    fn step_uses_floor_at_half_integers() {
        assert_eq!(step(&[0.5]), 1.0);
        assert_eq!(step(&[-0.5]), 0.0);
        assert_eq!(step(&[0.49999]), 0.0);
        assert_eq!(step(&[-1.5]), 1.0);
    }

    #[test]
    fn penalty_zero_inside() {
        assert_eq!(penalty_u(9.9, 10.0, 100.0, 4), 0.0);
        assert_eq!(penalty_u(-10.0, 10.0, 100.0, 4), 0.0);
        assert_eq!(penalty_u(11.0, 10.0, 100.0, 4), 100.0);
        assert_eq!(penalty_u(-12.0, 10.0, 100.0, 4), 1600.0);
    }

    #[test]
    fn f7_noise_is_bounded() {
        let f7 = by_id(7).unwrap();
        let x = vec![0.3; 30];
        let a = f7.evaluate(&x, &mut SimRng::seed_from_u64(1)).unwrap();
        let b = f7.evaluate(&x, &mut SimRng::seed_from_u64(2)).unwrap();
        assert!((a - b).abs() < 1.0);
        assert!(a >= quartic(&x) && a < quartic(&x) + 1.0);
    }
}
