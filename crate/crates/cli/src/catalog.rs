//! Known varieties with a simple residual category. Static data from the
//! literature, not computed by this crate.

use serde::Serialize;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CatalogRow {
    pub variety: &'static str,
    pub condition: &'static str,
    pub residual: &'static str,
    pub status: &'static str,
}

pub const CATALOG: &[CatalogRow] = &[
    CatalogRow { variety: "Gr(k,m)", condition: "gcd(k,m) = 1", residual: "zero", status: "proved" },
    CatalogRow {
        variety: "Gr(k,m)",
        condition: "gcd(k,m) > 1",
        residual: "completely orthogonal exceptional collection",
        status: "proved for (p, pr) with p in {2,3}; conjectural otherwise",
    },
    CatalogRow { variety: "P^(m-1) x P^(m-1), S2-invariant", condition: "m odd", residual: "zero", status: "proved" },
    CatalogRow {
        variety: "P^(m-1) x P^(m-1), S2-invariant",
        condition: "m even",
        residual: "completely orthogonal exceptional collection of length 2m",
        status: "proved",
    },
    CatalogRow { variety: "(P^1)^k, Sk-invariant", condition: "k odd", residual: "zero", status: "proved" },
    CatalogRow {
        variety: "(P^1)^k, Sk-invariant",
        condition: "k even",
        residual: "completely orthogonal exceptional collection",
        status: "proved",
    },
    CatalogRow { variety: "(P^(m-1))^3, S3-invariant", condition: "gcd(3,m) = 1", residual: "zero", status: "proved" },
    CatalogRow {
        variety: "(P^(m-1))^3, S3-invariant",
        condition: "m = 3",
        residual: "completely orthogonal exceptional collection",
        status: "proved; expected for 3 | m",
    },
    CatalogRow {
        variety: "IGr(3,8)",
        condition: "",
        residual: "completely orthogonal exceptional collection",
        status: "proved",
    },
    CatalogRow {
        variety: "E6/P1",
        condition: "",
        residual: "completely orthogonal exceptional collection",
        status: "proved",
    },
    CatalogRow { variety: "IGr(2,2k)", condition: "", residual: "D(A_{k-1})", status: "proved" },
    CatalogRow { variety: "Fl(1,2k-1;2k)", condition: "", residual: "D(A_{2k-1})", status: "proved" },
    CatalogRow { variety: "F4/P4", condition: "", residual: "D(A_2)", status: "proved" },
    CatalogRow { variety: "OGr(2,2k)", condition: "", residual: "D(D_k)", status: "proved" },
    CatalogRow { variety: "Q^(2k-1)", condition: "", residual: "D(A_1)", status: "proved" },
];

#[derive(Serialize)]
struct CatalogOut {
    schema_version: u32,
    computed: bool,
    rows: &'static [CatalogRow],
}

pub fn render(json: bool) -> String {
    if json {
        let out = CatalogOut { schema_version: crate::SCHEMA_VERSION, computed: false, rows: CATALOG };
        return serde_json::to_string_pretty(&out).expect("catalog serializes") + "\n";
    }
    let mut s = String::from("# static data, not computed\n");
    for r in CATALOG {
        let cond = if r.condition.is_empty() { String::new() } else { format!(" [{}]", r.condition) };
        s.push_str(&format!("{}{}: {} ({})\n", r.variety, cond, r.residual, r.status));
    }
    s
}
