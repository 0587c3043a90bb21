fn main() {
    println!("rei3bp");
}
