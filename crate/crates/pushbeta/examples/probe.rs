use pushbeta::*;
fn main() {
    let p = PushBetaParams::new(2000.0, 1500.0, 1000.0, 0.5, Direction::Left).unwrap();
    let d = PushBeta::with_config(p, QuadratureConfig::with_nodes(100_000)).unwrap();
    let mv = d.mean_variance().unwrap();
    println!("log_norm = {}", d.log_norm());
    println!("mean = {}, var = {}, sd = {}", mv.mean, mv.variance, mv.variance.sqrt());
    let med = d.quantile(0.5).unwrap();
    println!("median = {med}");
    for q in [0.4, 0.5, 0.52, 0.523, 0.53, 0.55] {
        println!("cdf({q}) = {}", d.cdf(q));
    }
}
