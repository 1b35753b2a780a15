//! File formats, printed by `--help`.

macro_rules! graph_schema {
    () => {
        "GRAPH (ADMG JSON)
  {\"vars\": [{\"name\": \"X\", \"cardinality\": 2}, ...],
   \"directed\": [[\"X\", \"Y\"], ...],
   \"bidirected\": [[\"X\", \"Y\"], ...]}
  Symbols of a variable with cardinality c are 0..c-1.
"
    };
}

macro_rules! query_schema {
    () => {
        "QUERY JSON
  {\"intervene\": [{\"var\": \"X\", \"value\": 1}], \"targets\": [\"Y\"]}
  Omitting \"targets\" asks for every non-intervened variable.
"
    };
}

macro_rules! net_schema {
    () => {
        "NET (causal Bayes net JSON)
  {\"nodes\": [
     {\"name\": \"U\", \"cardinality\": 2, \"hidden\": true, \"cpt\": [[0.5, 0.5]]},
     {\"name\": \"X\", \"cardinality\": 2, \"parents\": [\"U\"], \"cpt\": [[0.9, 0.1], [0.2, 0.8]]}]}
  One CPT row per parent configuration, the first parent varying slowest;
  rows sum to 1. Hidden nodes have no parents and exactly two observable
  children. Observables are numbered in declaration order.
"
    };
}

macro_rules! samples_schema {
    () => {
        "SAMPLES CSV
  Header row of variable names, then one row of integer symbols per sample.
"
    };
}

macro_rules! model_schema {
    () => {
        "MODEL (learned model JSON)
  {\"graph\": GRAPH, \"intervene\": [{\"var\": \"X\", \"value\": 1}],
   \"order\": [\"Z1\", \"Z2\", \"Y\"],
   \"factors\": [{\"target\": \"Z1\", \"kind\": \"q\" | \"s\", \"component\": i, \"sub\": j,
                \"given\": [\"X\"], \"rows\": [[...], ...], \"counts\": [[...], ...]}, ...],
   \"metadata\": {\"m_used\", \"source\", \"epsilon\", \"delta\", \"alpha\",
                \"budget\": {\"k\", \"d\", \"ell\", \"sigma\", \"eps_q\", \"eps_r\", \"m_q\", \"m_r\", \"m_required\"},
                \"rng_algorithm\", \"seed\"}}
  One factor per non-intervened variable, in topological order. \"given\"
  lists conditioning variables in declaration order; rows follow their
  configurations with the last variable varying fastest. \"component\"/\"sub\"
  appear on kind \"s\" only; \"counts\" on add-1 estimated factors only.
"
    };
}

macro_rules! errors_schema {
    () => {
        "ERRORS
  On failure stderr carries {\"error\": {\"kind\", \"message\", \"exit_code\", \"detail\"?}}.
  Exit codes: 0 success, 2 not identifiable, 3 positivity violation,
  4 input error. Floats are written with 17 significant digits.
"
    };
}

pub const ALL: &str = concat!(
    graph_schema!(),
    "\n",
    query_schema!(),
    "\n",
    net_schema!(),
    "\n",
    samples_schema!(),
    "\n",
    model_schema!(),
    "\n",
    errors_schema!()
);

pub const IDENTIFY: &str = concat!(
    graph_schema!(),
    "\n",
    query_schema!(),
    "
OUTPUT
  {\"identifiable\": true, \"formula\", \"latex\", \"estimand\": {...}, \"trace\": [{\"step\", \"depth\", \"call\"}]}
  or {\"identifiable\": false, \"hedge\": {\"root\", \"graph\", \"intervened\"}, \"trace\"} with exit 2.
"
);

pub const ORACLE: &str = concat!(
    net_schema!(),
    "\n",
    query_schema!(),
    "
OUTPUT
  {\"intervene\", \"targets\", \"table\": [{\"assignment\": {\"Y\": 0}, \"p\": 0.25}, ...]}
"
);

pub const SIMULATE: &str = concat!(net_schema!(), "\n", samples_schema!());

pub const LEARN: &str = concat!(
    graph_schema!(),
    "\n",
    query_schema!(),
    "  Learning needs every non-intervened variable as a target.\n\n",
    samples_schema!(),
    "\n",
    net_schema!(),
    "\n",
    model_schema!(),
    "
Without --m, --net draws as many samples as the accuracy budget asks for
(refused above 1e8).
"
);

pub const EVAL: &str = concat!(
    model_schema!(),
    "
POINT
  {\"Z1\": 0, \"Z2\": 1, \"Y\": 0} assigning every non-intervened variable.
OUTPUT
  {\"probability\": p}
"
);

pub const SAMPLE: &str = concat!(model_schema!(), "\n", samples_schema!());

pub const VERIFY: &str = concat!(
    model_schema!(),
    "\n",
    net_schema!(),
    "
OUTPUT
  {\"tv\", \"kl\", \"pinsker_bound\", \"factors\": [{\"target\", \"kind\", \"worst_row_error\"}],
   \"sampled_tv\": {\"estimate\", \"samples\", \"tolerance\"}}   (sampled_tv with --seed)
"
);

pub const DEMO: &str = "EXAMPLES
  example1  front-door style graph, P_x(Z1, Z2, Y)
  example2  W→R→X→Y with W↔X, W↔Y, P_{w,r,x}(Y)
Builds a random net on the graph (seeded), compiles the estimand, checks it
against the exact interventional table, learns from --m samples and reports
the distance to the truth.
";
