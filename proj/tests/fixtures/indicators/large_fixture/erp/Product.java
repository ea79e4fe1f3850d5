package erp;

public class Product {
    public int price() {
        return 1;
    }
}
