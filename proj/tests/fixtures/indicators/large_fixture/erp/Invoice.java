package erp;

public class Invoice {
    public int number() {
        return 1;
    }
}
