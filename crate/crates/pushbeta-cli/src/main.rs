fn main() {
    println!("pushbeta");
}
